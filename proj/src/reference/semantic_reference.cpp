#include <algorithm>
#include <set>
#include <utility>

#include "hyprec/reference.hpp"

namespace hyprec::reference {

SimilarityEdgeSet mine_semantic_edges(const ItemEmbeddingTable& table, double threshold,
                                      std::size_t budget, TopKMode mode) {
  std::vector<std::string> names;
  for (const auto& [name, v] : table.pooled) names.push_back(name);
  const std::size_t n = names.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sim[i][j] = cosine_similarity(table.pooled.at(names[i]), table.pooled.at(names[j]));
    }
  }
  SimilarityEdgeSet out;
  out.threshold = threshold;
  out.budget = budget;
  out.mode = mode;
  if (mode == TopKMode::Global) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (sim[i][j] >= threshold) pairs.emplace_back(i, j);
      }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
      const double sa = sim[a.first][a.second], sb = sim[b.first][b.second];
      return sa != sb ? sa > sb : a < b;
    });
    if (pairs.size() > budget) pairs.resize(budget);
    for (const auto& [i, j] : pairs) out.edges.push_back({names[i], names[j], sim[i][j]});
  } else {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> cand;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && sim[i][j] >= threshold) cand.push_back(j);
      }
      std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        return sim[i][a] != sim[i][b] ? sim[i][a] > sim[i][b] : a < b;
      });
      if (cand.size() > budget) cand.resize(budget);
      for (std::size_t j : cand) {
        if (seen.insert({std::min(i, j), std::max(i, j)}).second) {
          out.edges.push_back({names[i], names[j], sim[i][j]});
        }
      }
    }
  }
  std::stable_sort(out.edges.begin(), out.edges.end(), [](const SimilarityEdge& a, const SimilarityEdge& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return std::minmax(a.item_a, a.item_b) < std::minmax(b.item_a, b.item_b);
  });
  return out;
}

}  // namespace hyprec::reference
