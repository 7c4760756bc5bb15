#include "hyprec/evaluator.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/random.hpp"

namespace hyprec {

EvalCandidates build_candidates(const SplitDataset& split, EvalSplit which, std::uint64_t seed,
                                std::size_t n_negatives) {
  const auto& held = which == EvalSplit::Dev ? split.dev : split.test;
  EvalCandidates out;
  out.seed = seed;
  out.queries.resize(held.size());
  const auto n = static_cast<std::ptrdiff_t>(held.size());
  const std::size_t universe = split.items.size();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t qi = 0; qi < n; ++qi) {
    const Triple& t = held[static_cast<std::size_t>(qi)];
    EvalQuery& q = out.queries[static_cast<std::size_t>(qi)];
    q.user = t.head;
    q.item = t.tail;
    const auto& line = split.timelines.at(t.head);
    const std::unordered_set<EntityId> touched(line.begin(), line.end());
    std::size_t touched_in_universe = 0;
    for (EntityId i : touched) {
      touched_in_universe += std::binary_search(split.items.begin(), split.items.end(), i);
    }
    const std::size_t eligible = universe - touched_in_universe;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t.head), static_cast<std::uint64_t>(t.tail)));
    if (eligible >= 2 * n_negatives) {
      std::unordered_set<EntityId> chosen;
      while (q.negatives.size() < n_negatives) {
        const EntityId c = split.items[uniform_index(rng, universe)];
        if (touched.contains(c) || !chosen.insert(c).second) continue;
        q.negatives.push_back(c);
      }
    } else {
      std::vector<EntityId> pool;
      pool.reserve(eligible);
      for (EntityId c : split.items) {
        if (!touched.contains(c)) pool.push_back(c);
      }
      const std::size_t take = std::min(n_negatives, pool.size());
      for (std::size_t k = 0; k < take; ++k) {
        std::swap(pool[k], pool[k + uniform_index(rng, pool.size() - k)]);
      }
      pool.resize(take);
      q.negatives = std::move(pool);
      q.short_list = take < n_negatives;
    }
  }
  std::stable_sort(out.queries.begin(), out.queries.end(),
                   [](const EvalQuery& a, const EvalQuery& b) { return a.user < b.user; });
  for (const auto& q : out.queries) out.short_lists += q.short_list;
  return out;
}

int rank_ground_truth(double gt, std::span<const double> negatives) {
  if (negatives.empty()) throw std::invalid_argument("rank_ground_truth: no negatives");
  if (!std::isfinite(gt)) throw NumericalError("non-finite ground-truth score");
  int rank = 1;
  for (double s : negatives) {
    if (!std::isfinite(s)) throw NumericalError("non-finite negative score");
    if (s >= gt) ++rank;
  }
  return rank;
}

double dcg_at_10(int rank) { return rank <= kCutoff ? 1.0 / std::log2(rank + 1.0) : 0.0; }

SliceMetrics metrics_at_10(std::span<const int> ranks) {
  SliceMetrics m;
  m.n_users = ranks.size();
  if (ranks.empty()) return m;
  for (int r : ranks) {
    m.hr10 += r <= kCutoff ? 1.0 : 0.0;
    m.dcg10 += dcg_at_10(r);
  }
  m.hr10 /= static_cast<double>(ranks.size());
  m.dcg10 /= static_cast<double>(ranks.size());
  return m;
}

std::vector<int> rank_with_model(const ParameterStore& store, RelationId buy,
                                 const EvalCandidates& candidates) {
  return rank_queries(candidates, [&](EntityId u, EntityId i) { return score(store, {u, buy, i}); });
}

double random_score(std::uint64_t seed, EntityId user, EntityId item) {
  const std::uint64_t bits =
      derive_seed(seed, static_cast<std::uint64_t>(user), static_cast<std::uint64_t>(item));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<EntityId> cold_slice(const SplitDataset& split, std::span<const EvalQuery> queries,
                                 double fraction) {
  std::vector<std::pair<std::size_t, EntityId>> users;
  users.reserve(queries.size());
  for (const auto& q : queries) users.emplace_back(split.train_interactions(q.user), q.user);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  const auto size = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(users.size()) - 1e-9));
  std::vector<EntityId> out;
  for (std::size_t i = 0; i < std::min(size, users.size()); ++i) out.push_back(users[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

RankingReport make_report(const SplitDataset& split, const EvalCandidates& candidates,
                          std::vector<int> ranks) {
  RankingReport r;
  r.ranks = std::move(ranks);
  r.all = metrics_at_10(r.ranks);
  r.cold_users = cold_slice(split, candidates.queries);
  std::vector<int> cold;
  for (std::size_t i = 0; i < candidates.queries.size(); ++i) {
    if (std::binary_search(r.cold_users.begin(), r.cold_users.end(), candidates.queries[i].user)) {
      cold.push_back(r.ranks[i]);
    }
  }
  r.cold = metrics_at_10(cold);
  return r;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 3) throw std::invalid_argument("spearman: need at least 3 points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = (static_cast<double>(a.size()) + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::size_t> reconstruct_hierarchy(const std::vector<std::vector<double>>& points,
                                               std::size_t start, NormMetric metric) {
  if (start >= points.size()) throw std::out_of_range("reconstruct_hierarchy: unknown start");
  std::vector<double> norms(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) norms[i] = ball::norm(points[i]);
  const auto dist = [&](std::size_t a, std::size_t b) {
    if (metric == NormMetric::Hyperbolic) return ball::distance(points[a], points[b]);
    double s = 0.0;
    for (std::size_t k = 0; k < points[a].size(); ++k) {
      const double d = points[a][k] - points[b][k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<char> visited(points.size(), 0);
  std::vector<std::size_t> chain{start};
  visited[start] = 1;
  for (std::size_t cur = start;;) {
    std::size_t best = points.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (visited[j] || norms[j] > norms[cur]) continue;
      const double d = dist(cur, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == points.size()) break;
    visited[best] = 1;
    chain.push_back(best);
    cur = best;
  }
  return chain;
}

}  // namespace hyprec
