#include "hyprec/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/errors.hpp"

namespace hyprec {

void ItemEmbeddingTable::add(std::string_view item, std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("empty embedding vector");
  if (dim == 0) dim = v.size();
  if (v.size() != dim) {
    throw std::invalid_argument("embedding for " + std::string(item) + " has dimension " +
                                std::to_string(v.size()) + ", expected " + std::to_string(dim));
  }
  vectors[std::string(item)].push_back(std::move(v));
}

ItemEmbeddingTable pool_item_embeddings(ItemEmbeddingTable table) {
  table.pooled.clear();
  for (const auto& [item, vs] : table.vectors) {
    if (vs.empty()) continue;
    std::vector<double> mean(table.dim, 0.0);
    for (const auto& v : vs) {
      if (v.size() != table.dim) {
        throw std::invalid_argument("inconsistent embedding dimension for item " + item);
      }
      for (std::size_t k = 0; k < v.size(); ++k) mean[k] += v[k];
    }
    for (double& x : mean) x /= static_cast<double>(vs.size());
    table.pooled.emplace(item, std::move(mean));
  }
  return table;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  const double na = ball::norm(a);
  const double nb = ball::norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  return std::clamp(ball::dot(a, b) / (na * nb), -1.0, 1.0);
}

std::string_view to_string(TopKMode mode) {
  return mode == TopKMode::Global ? "global" : "per-item";
}

std::optional<TopKMode> parse_topk_mode(std::string_view s) {
  if (s == "global") return TopKMode::Global;
  if (s == "per-item") return TopKMode::PerItem;
  return std::nullopt;
}

namespace detail {

SimilarityEdgeSet assemble_edges(const std::vector<std::string>& names,
                                 const std::vector<std::vector<Candidate>>& selected,
                                 double threshold, std::size_t budget, TopKMode mode) {
  struct Pair {
    std::int32_t a, b;
    double sim;
  };
  std::vector<Pair> pairs;
  if (mode == TopKMode::PerItem) {
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      for (const auto& c : selected[i]) {
        const auto a = static_cast<std::int32_t>(i);
        const auto lo = static_cast<std::uint64_t>(std::min(a, c.other));
        const auto hi = static_cast<std::uint64_t>(std::max(a, c.other));
        if (seen.insert(lo << 32 | hi).second) pairs.push_back({a, c.other, c.similarity});
      }
    }
  } else {
    for (std::size_t i = 0; i < selected.size(); ++i) {
      for (const auto& c : selected[i]) pairs.push_back({static_cast<std::int32_t>(i), c.other, c.similarity});
    }
  }
  const auto key_less = [](const Pair& x, const Pair& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    const auto xl = std::min(x.a, x.b), xh = std::max(x.a, x.b);
    const auto yl = std::min(y.a, y.b), yh = std::max(y.a, y.b);
    return std::pair(xl, xh) < std::pair(yl, yh);
  };
  std::sort(pairs.begin(), pairs.end(), key_less);
  if (mode == TopKMode::Global && pairs.size() > budget) pairs.resize(budget);

  SimilarityEdgeSet out;
  out.threshold = threshold;
  out.budget = budget;
  out.mode = mode;
  out.edges.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.edges.push_back({names[static_cast<std::size_t>(p.a)], names[static_cast<std::size_t>(p.b)], p.sim});
  }
  return out;
}

}  // namespace detail

SimilarityEdgeSet mine_semantic_edges(const ItemEmbeddingTable& table, double threshold,
                                      std::size_t budget, TopKMode mode,
                                      const MiningOptions& options) {
  const std::size_t n = table.pooled.size();
  const std::size_t d = table.dim;
  std::vector<std::string> names;
  names.reserve(n);
  Matrix unit(n, d);
  {
    std::size_t i = 0;
    for (const auto& [item, v] : table.pooled) {
      const double nv = ball::norm(v);
      if (nv == 0.0) throw std::invalid_argument("pooled embedding of item " + item + " is zero");
      for (std::size_t k = 0; k < d; ++k) unit(i, k) = v[k] / nv;
      names.push_back(item);
      ++i;
    }
  }
  std::vector<std::vector<detail::Candidate>> selected(n);
  if (budget == 0 || n < 2) return detail::assemble_edges(names, selected, threshold, budget, mode);

  const std::size_t block_rows =
      std::clamp<std::size_t>(options.memory_budget_bytes / (n * sizeof(double)), 1, n);
  Matrix block(block_rows, n);

  for (std::size_t i0 = 0; i0 < n; i0 += block_rows) {
    const std::size_t i1 = std::min(n, i0 + block_rows);
    const auto rows = static_cast<std::ptrdiff_t>(i1 - i0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < rows; ++bi) {
      const std::size_t i = i0 + static_cast<std::size_t>(bi);
      const auto ui = unit.row(i);
      auto out = block.row(static_cast<std::size_t>(bi));
      for (std::size_t j = 0; j < n; ++j) out[j] = ball::dot(ui, unit.row(j));
    }

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t bi = 0; bi < rows; ++bi) {
      const std::size_t i = i0 + static_cast<std::size_t>(bi);
      const auto sims = block.row(static_cast<std::size_t>(bi));
      std::vector<detail::Candidate> cands;
      const std::size_t j0 = mode == TopKMode::Global ? i + 1 : 0;
      for (std::size_t j = j0; j < n; ++j) {
        if (j == i) continue;
        const double s = std::min(sims[j], 1.0);
        if (s >= threshold) cands.push_back({s, static_cast<std::int32_t>(j)});
      }
      // The global top-K is contained in the union of per-row top-K lists.
      if (cands.size() > budget) {
        std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(budget),
                          cands.end(), detail::better);
        cands.resize(budget);
      } else {
        std::sort(cands.begin(), cands.end(), detail::better);
      }
      selected[i] = std::move(cands);
    }
  }
  return detail::assemble_edges(names, selected, threshold, budget, mode);
}

KnowledgeGraph merge_semantic_edges(KnowledgeGraph g, const SimilarityEdgeSet& edges) {
  if (edges.edges.empty()) return g;
  const RelationId rel = g.relations.intern(kSemanticRelation);
  for (const auto& e : edges.edges) {
    const auto a = g.entities.find(e.item_a);
    const auto b = g.entities.find(e.item_b);
    if (!a) throw InputError("semantic edge references unknown item " + e.item_a);
    if (!b) throw InputError("semantic edge references unknown item " + e.item_b);
    g.add(Triple{*a, rel, *b});
  }
  return g;
}

std::string inverse_relation_name(std::string_view relation) {
  return std::string(relation) + "^-1";
}

KnowledgeGraph add_inverse_relations(KnowledgeGraph g) {
  const std::size_t base = g.relations.size();
  std::vector<RelationId> inverse(base);
  for (std::size_t r = 0; r < base; ++r) {
    inverse[r] = g.relations.intern(inverse_relation_name(g.relations.name(static_cast<RelationId>(r))));
  }
  const std::vector<Triple> original = g.triples();
  for (const auto& t : original) {
    g.add(Triple{t.tail, inverse[static_cast<std::size_t>(t.relation)], t.head});
  }
  return g;
}

}  // namespace hyprec
