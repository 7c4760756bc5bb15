#pragma once

// Straightforward serial versions of the parallel kernels. They share no code
// paths with the optimized implementations beyond the scalar primitives and are
// used as test oracles and benchmark baselines.

#include <functional>
#include <span>
#include <vector>

#include "hyprec/evaluator.hpp"
#include "hyprec/graph_geometry.hpp"
#include "hyprec/semantic.hpp"
#include "hyprec/trainer.hpp"

namespace hyprec::reference {

// Full similarity matrix from cosine_similarity, sorted selection.
SimilarityEdgeSet mine_semantic_edges(const ItemEmbeddingTable& table, double threshold,
                                      std::size_t budget, TopKMode mode);

// Four nested loops over all node quadruples.
DeltaResult delta_exact(const SimpleGraph& g);

// Costs from full BFS distances instead of the short-range shortcut.
CurvatureReport edge_curvatures(const SimpleGraph& g, const CurvatureOptions& options);

std::vector<int> rank_queries(const EvalCandidates& candidates,
                              const std::function<double(EntityId, EntityId)>& scorer);

// Accumulates each scored triple straight into the dense gradient.
double batch_gradient(const ParameterStore& store, std::span<const TrainExample> batch,
                      ParameterStore& grads);

}  // namespace hyprec::reference
