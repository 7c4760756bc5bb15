#include <algorithm>

#include "hyprec/reference.hpp"

namespace hyprec::reference {

DeltaResult delta_exact(const SimpleGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::int32_t>> d(n);
  for (std::size_t s = 0; s < n; ++s) d[s] = bfs_distances(g, static_cast<NodeId>(s));
  DeltaResult r;
  double sum = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t x = w + 1; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        for (std::size_t z = y + 1; z < n; ++z) {
          const double a = d[w][x] + d[y][z];
          const double b = d[w][y] + d[x][z];
          const double c = d[w][z] + d[x][y];
          double s[3] = {a, b, c};
          std::sort(s, s + 3);
          const double delta = (s[2] - s[1]) / 2.0;
          sum += delta;
          r.max = std::max(r.max, delta);
          ++r.quadruples;
        }
      }
    }
  }
  r.mean = r.quadruples ? sum / static_cast<double>(r.quadruples) : 0.0;
  r.pool = n;
  r.exhaustive = true;
  return r;
}

CurvatureReport edge_curvatures(const SimpleGraph& g, const CurvatureOptions& options) {
  CurvatureReport report;
  report.alpha = options.alpha;
  report.support_cap = options.support_cap;
  std::vector<double> sum(g.node_count(), 0.0);
  for (const auto& [u, v] : g.edges()) {
    const NodeMeasure mu = neighbour_measure(g, u, options);
    const NodeMeasure mv = neighbour_measure(g, v, options);
    Matrix cost(mu.support.size(), mv.support.size());
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
      const auto dist = bfs_distances(g, mu.support[i]);
      for (std::size_t j = 0; j < mv.support.size(); ++j) cost(i, j) = dist[static_cast<std::size_t>(mv.support[j])];
    }
    const double kappa = 1.0 - wasserstein1(mu.mass, mv.mass, cost, options.support_cap);
    report.edges.push_back({u, v, kappa});
    sum[static_cast<std::size_t>(u)] += kappa;
    sum[static_cast<std::size_t>(v)] += kappa;
  }
  const std::size_t room = options.support_cap - (options.alpha > 0.0 ? 1 : 0);
  report.node_kappa.assign(g.node_count(), 0.0);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (g.degree(static_cast<NodeId>(v)) > 0) report.node_kappa[v] = sum[v] / static_cast<double>(g.degree(static_cast<NodeId>(v)));
    if (g.degree(static_cast<NodeId>(v)) > room) ++report.subsampled_nodes;
  }
  return report;
}

}  // namespace hyprec::reference
