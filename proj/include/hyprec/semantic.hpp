#pragma once

// Semantic item-item edges mined from precomputed text embeddings, and the
// inverse-relation data extension.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyprec/knowledge_graph.hpp"
#include "hyprec/matrix.hpp"

namespace hyprec {

struct ItemEmbeddingTable {
  std::size_t dim = 0;
  // One vector per review/descriptor, keyed by item id.
  std::map<std::string, std::vector<std::vector<double>>> vectors;
  // Mean of each item's vectors; filled by pool_item_embeddings.
  std::map<std::string, std::vector<double>> pooled;

  // Appends one vector; the first vector fixes `dim`. Throws std::invalid_argument
  // on a dimension mismatch.
  void add(std::string_view item, std::vector<double> v);
};

ItemEmbeddingTable pool_item_embeddings(ItemEmbeddingTable table);

// Throws std::invalid_argument for zero vectors or mismatched lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class TopKMode { Global, PerItem };
std::string_view to_string(TopKMode mode);
std::optional<TopKMode> parse_topk_mode(std::string_view s);

// In per-item mode item_a is the item that selected item_b; when both selected
// each other the pair is stored once as (smaller, larger).
struct SimilarityEdge {
  std::string item_a;
  std::string item_b;
  double similarity = 0.0;

  bool operator==(const SimilarityEdge&) const = default;
};

struct SimilarityEdgeSet {
  std::vector<SimilarityEdge> edges;  // sorted by similarity desc, then (item_a, item_b)
  double threshold = 0.5;
  std::size_t budget = 10;
  TopKMode mode = TopKMode::PerItem;
};

struct MiningOptions {
  // Upper bound on the similarity block buffer.
  std::size_t memory_budget_bytes = std::size_t{256} << 20;
};

// Exact pairwise cosine similarity over pooled vectors, blocked over rows and
// parallel within a block. Items are ordered by id, so the output does not depend
// on the order they were added; ties resolve by (smaller id, larger id).
SimilarityEdgeSet mine_semantic_edges(const ItemEmbeddingTable& table, double threshold,
                                      std::size_t budget, TopKMode mode,
                                      const MiningOptions& options = {});

// Adds (item_a, has_semantic_similarity, item_b) per edge, skipping duplicates.
// Throws InputError when an item is not an entity of g.
KnowledgeGraph merge_semantic_edges(KnowledgeGraph g, const SimilarityEdgeSet& edges);

std::string inverse_relation_name(std::string_view relation);

// For every (h, r, t) adds (t, r^-1, h), with one fresh relation per existing relation.
KnowledgeGraph add_inverse_relations(KnowledgeGraph g);

namespace detail {

struct Candidate {
  double similarity;
  std::int32_t other;
};

// Orders candidates best-first: similarity desc, then partner index asc.
inline bool better(const Candidate& a, const Candidate& b) {
  return a.similarity > b.similarity || (a.similarity == b.similarity && a.other < b.other);
}

// Turns per-row selections into the final, deduplicated and sorted edge set.
SimilarityEdgeSet assemble_edges(const std::vector<std::string>& names,
                                 const std::vector<std::vector<Candidate>>& selected,
                                 double threshold, std::size_t budget, TopKMode mode);

}  // namespace detail

}  // namespace hyprec
