#include "transport_oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace hyprec::testing {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Flows on a spanning tree: repeatedly settle a row or column with one open cell.
bool tree_flows(const std::vector<std::pair<int, int>>& cells, std::vector<double> supply,
                std::vector<double> demand, std::vector<double>& flow) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  flow.assign(cells.size(), 0.0);
  std::vector<char> done(cells.size(), 0);
  for (std::size_t settled = 0; settled < cells.size();) {
    bool progress = false;
    for (int node = 0; node < m + n && settled < cells.size(); ++node) {
      int open = -1;
      int count = 0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (done[c]) continue;
        const bool touches = node < m ? cells[c].first == node : cells[c].second == node - m;
        if (touches) {
          open = static_cast<int>(c);
          ++count;
        }
      }
      if (count != 1) continue;
      const auto [i, j] = cells[static_cast<std::size_t>(open)];
      const double f = node < m ? supply[static_cast<std::size_t>(i)] : demand[static_cast<std::size_t>(j)];
      flow[static_cast<std::size_t>(open)] = f;
      supply[static_cast<std::size_t>(i)] -= f;
      demand[static_cast<std::size_t>(j)] -= f;
      done[static_cast<std::size_t>(open)] = 1;
      ++settled;
      progress = true;
    }
    if (!progress) return false;
  }
  for (double f : flow) {
    if (f < -1e-12) return false;
  }
  return true;
}

}  // namespace

double brute_force_w1(std::span<const double> mu, std::span<const double> nu, const Matrix& cost) {
  const int m = static_cast<int>(mu.size());
  const int n = static_cast<int>(nu.size());
  const int cells = m * n;
  const int pick = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(pick));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> flow;
  for (;;) {
    Dsu dsu(m + n);
    bool tree = true;
    std::vector<std::pair<int, int>> chosen;
    for (int c : idx) {
      const int i = c / n, j = c % n;
      chosen.emplace_back(i, j);
      if (!dsu.unite(i, m + j)) {
        tree = false;
        break;
      }
    }
    if (tree && tree_flows(chosen, {mu.begin(), mu.end()}, {nu.begin(), nu.end()}, flow)) {
      double total = 0.0;
      for (std::size_t c = 0; c < chosen.size(); ++c) {
        total += flow[c] * cost(static_cast<std::size_t>(chosen[c].first), static_cast<std::size_t>(chosen[c].second));
      }
      best = std::min(best, total);
    }
    int k = pick - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == cells - pick + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int r = k + 1; r < pick; ++r) idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
  }
  return best;
}

}  // namespace hyprec::testing
