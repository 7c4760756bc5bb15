#pragma once

// Sampled-negative ranking protocol: one held-out item per user ranked against
// 100 items the user never interacted with, HR@10 and DCG@10, cold-user slices
// and embedding-norm analyses.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hyprec/dataset.hpp"
#include "hyprec/errors.hpp"
#include "hyprec/kg_models.hpp"

namespace hyprec {

inline constexpr std::size_t kEvalNegatives = 100;
inline constexpr int kCutoff = 10;

struct EvalQuery {
  EntityId user = 0;
  EntityId item = 0;  // ground truth
  std::vector<EntityId> negatives;
  bool short_list = false;  // fewer than the requested negatives were available
};

struct EvalCandidates {
  std::uint64_t seed = 0;
  std::vector<EvalQuery> queries;  // ordered by user id
  std::size_t short_lists = 0;
};

enum class EvalSplit { Dev, Test };

// Negatives are drawn without replacement from split.items minus every item the
// user touched in any split, with a stream seeded by (seed, user, ground truth).
EvalCandidates build_candidates(const SplitDataset& split, EvalSplit which, std::uint64_t seed,
                                std::size_t n_negatives = kEvalNegatives);

// 1 + number of negatives scoring >= the ground truth. Throws NumericalError on
// non-finite scores and std::invalid_argument on an empty negative list.
int rank_ground_truth(double gt, std::span<const double> negatives);

struct SliceMetrics {
  double hr10 = 0.0;
  double dcg10 = 0.0;
  std::size_t n_users = 0;
};

double dcg_at_10(int rank);
SliceMetrics metrics_at_10(std::span<const int> ranks);

// Ranks every query with scorer(user, item). The scorer must be safe to call
// concurrently; queries are independent so the result does not depend on the
// thread count.
template <class Scorer>
std::vector<int> rank_queries(const EvalCandidates& candidates, const Scorer& scorer) {
  const auto& qs = candidates.queries;
  std::vector<int> ranks(qs.size(), 0);
  std::atomic<bool> bad{false};
  const auto n = static_cast<std::ptrdiff_t>(qs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const EvalQuery& q = qs[static_cast<std::size_t>(i)];
    const double gt = scorer(q.user, q.item);
    int rank = 1;
    bool finite = std::isfinite(gt);
    for (EntityId neg : q.negatives) {
      const double s = scorer(q.user, neg);
      finite = finite && std::isfinite(s);
      if (s >= gt) ++rank;
    }
    if (!finite) bad.store(true, std::memory_order_relaxed);
    ranks[static_cast<std::size_t>(i)] = rank;
  }
  if (bad.load()) throw NumericalError("non-finite score during evaluation");
  return ranks;
}

// Scores (user, buy, item) with the model.
std::vector<int> rank_with_model(const ParameterStore& store, RelationId buy,
                                 const EvalCandidates& candidates);

// Uniform scores that depend only on (seed, user, item).
double random_score(std::uint64_t seed, EntityId user, EntityId item);

// ceil(2% of the evaluated users) with the fewest train interactions, ties by id.
std::vector<EntityId> cold_slice(const SplitDataset& split, std::span<const EvalQuery> queries,
                                 double fraction = 0.02);

struct RankingReport {
  std::vector<int> ranks;  // parallel to candidates.queries
  SliceMetrics all;
  SliceMetrics cold;
  std::vector<EntityId> cold_users;
};

RankingReport make_report(const SplitDataset& split, const EvalCandidates& candidates,
                          std::vector<int> ranks);

// Spearman rank correlation with average ranks for ties. Throws
// std::invalid_argument for mismatched lengths or fewer than 3 points. Returns 0
// when either side is constant.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

enum class NormMetric { Euclidean, Hyperbolic };

// points are ball points for Hyperbolic and plain vectors otherwise. From `start`,
// repeatedly moves to the nearest unvisited point whose norm does not exceed the
// current one; ties go to the smaller index.
std::vector<std::size_t> reconstruct_hierarchy(const std::vector<std::vector<double>>& points,
                                               std::size_t start, NormMetric metric);

}  // namespace hyprec
