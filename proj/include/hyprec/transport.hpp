#pragma once

#include <cstddef>
#include <span>

#include "hyprec/matrix.hpp"

namespace hyprec {

inline constexpr std::size_t kDefaultSupportCap = 64;

// Exact Wasserstein-1 distance between two finite distributions with the given
// supports' pairwise costs (cost.rows == mu.size(), cost.cols == nu.size()).
// Solved with the transportation simplex (network simplex on the bipartite
// support graph) using Bland's rule. Both distributions must sum to 1 within
// 1e-12. Throws std::invalid_argument when either support exceeds `cap`.
double wasserstein1(std::span<const double> mu, std::span<const double> nu, const Matrix& cost,
                    std::size_t cap = kDefaultSupportCap);

// Optimal transport plan for the same problem; the plan is |mu| x |nu|.
Matrix transport_plan(std::span<const double> mu, std::span<const double> nu, const Matrix& cost,
                      std::size_t cap = kDefaultSupportCap);

}  // namespace hyprec
