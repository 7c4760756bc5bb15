#pragma once

// Exhaustive transport solver: every optimal plan of a transportation problem is
// attained at a basic feasible solution, i.e. a spanning tree of the bipartite
// support graph with m + n - 1 cells. Enumerates all such trees, solves the
// flows by leaf elimination and keeps the cheapest non-negative one.

#include <span>

#include "hyprec/matrix.hpp"

namespace hyprec::testing {

double brute_force_w1(std::span<const double> mu, std::span<const double> nu, const Matrix& cost);

}  // namespace hyprec::testing
