#include "hyprec/graph_geometry.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "hyprec/errors.hpp"
#include "hyprec/random.hpp"

namespace hyprec {

namespace {

// Hop distance between nodes known to be at most 3 apart.
int short_distance(const SimpleGraph& g, NodeId a, NodeId b) {
  if (a == b) return 0;
  if (g.has_edge(a, b)) return 1;
  const auto& na = g.adjacency[static_cast<std::size_t>(a)];
  const auto& nb = g.adjacency[static_cast<std::size_t>(b)];
  auto i = na.begin();
  auto j = nb.begin();
  while (i != na.end() && j != nb.end()) {
    if (*i == *j) return 2;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return 3;
}

std::uint64_t choose4(std::uint64_t n) {
  if (n < 4) return 0;
  return n * (n - 1) / 2 * (n - 2) / 3 * (n - 3) / 4;
}

struct DeltaAccumulator {
  double sum = 0.0;
  double max = 0.0;
  std::uint64_t count = 0;
};

DeltaAccumulator enumerate_quadruples(const std::vector<std::int32_t>& dist, std::size_t n) {
  double sum = 0.0;
  double max = 0.0;
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto d = [&](std::size_t a, std::size_t b) { return static_cast<double>(dist[a * n + b]); };
  // Each delta is a multiple of 0.5, so the sum is exact and order independent.
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : sum) reduction(max : max)
  for (std::ptrdiff_t wi = 0; wi < nn; ++wi) {
    const auto w = static_cast<std::size_t>(wi);
    for (std::size_t x = w + 1; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        for (std::size_t z = y + 1; z < n; ++z) {
          const double delta =
              four_point_delta(d(w, x), d(y, z), d(w, y), d(x, z), d(w, z), d(x, y));
          sum += delta;
          max = std::max(max, delta);
        }
      }
    }
  }
  return {sum, max, choose4(n)};
}

void require_connected(const std::vector<std::int32_t>& dist) {
  if (std::any_of(dist.begin(), dist.end(), [](std::int32_t v) { return v < 0; })) {
    throw std::invalid_argument("delta-hyperbolicity requires a connected graph");
  }
}

}  // namespace

std::size_t SimpleGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adjacency) twice += n.size();
  return twice / 2;
}

bool SimpleGraph::has_edge(NodeId a, NodeId b) const {
  const auto& n = adjacency[static_cast<std::size_t>(a)];
  return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::pair<NodeId, NodeId>> SimpleGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    for (NodeId v : adjacency[u]) {
      if (static_cast<std::size_t>(v) > u) out.emplace_back(static_cast<NodeId>(u), v);
    }
  }
  return out;
}

SimpleGraph SimpleGraph::from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  SimpleGraph g;
  g.adjacency.assign(n, {});
  g.entity_of.resize(n);
  std::iota(g.entity_of.begin(), g.entity_of.end(), 0);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw std::out_of_range("edge endpoint outside node range");
    }
    g.adjacency[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return g;
}

SimpleGraph largest_connected_component(const SimpleGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int32_t> comp(n, -1);
  std::int32_t best = -1;
  std::size_t best_size = 0;
  std::int32_t label = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::size_t size = 0;
    std::vector<NodeId> stack{static_cast<NodeId>(s)};
    comp[s] = label;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId w : g.adjacency[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = label;
          stack.push_back(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = label;
    }
    ++label;
  }
  std::vector<NodeId> renumber(n, -1);
  SimpleGraph out;
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] != best) continue;
    renumber[v] = static_cast<NodeId>(out.entity_of.size());
    out.entity_of.push_back(g.entity_of[v]);
  }
  out.adjacency.resize(out.entity_of.size());
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] != best) continue;
    auto& dst = out.adjacency[static_cast<std::size_t>(renumber[v])];
    for (NodeId w : g.adjacency[v]) dst.push_back(renumber[static_cast<std::size_t>(w)]);
  }
  return out;
}

SimpleGraph collapse_graph(const KnowledgeGraph& kg) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(kg.size());
  for (const auto& t : kg.triples()) {
    if (t.head != t.tail) edges.emplace_back(t.head, t.tail);
  }
  if (edges.empty()) throw InputError("graph has no edges between distinct entities");
  return largest_connected_component(SimpleGraph::from_edges(kg.entities.size(), edges));
}

std::vector<std::int32_t> bfs_distances(const SimpleGraph& g, NodeId source) {
  std::vector<std::int32_t> dist(g.node_count(), -1);
  std::vector<NodeId> frontier{source};
  dist[static_cast<std::size_t>(source)] = 0;
  std::size_t head = 0;
  while (head < frontier.size()) {
    const NodeId v = frontier[head++];
    const std::int32_t dv = dist[static_cast<std::size_t>(v)];
    for (NodeId w : g.adjacency[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dv + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<std::int32_t> all_pairs_distances(const SimpleGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int32_t> dist(n * n);
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t s = 0; s < nn; ++s) {
    const auto row = bfs_distances(g, static_cast<NodeId>(s));
    std::copy(row.begin(), row.end(), dist.begin() + s * nn);
  }
  return dist;
}

DeltaResult delta_from_distances(const std::vector<std::int32_t>& dist, std::size_t n) {
  if (n < 4) throw std::invalid_argument("delta-hyperbolicity needs at least 4 nodes");
  require_connected(dist);
  const auto acc = enumerate_quadruples(dist, n);
  DeltaResult r;
  r.quadruples = acc.count;
  r.mean = acc.sum / static_cast<double>(acc.count);
  r.max = acc.max;
  r.pool = n;
  r.exhaustive = true;
  return r;
}

DeltaResult delta_hyperbolicity(const SimpleGraph& g, const DeltaOptions& options) {
  const std::size_t n = g.node_count();
  if (n < 4) throw std::invalid_argument("delta-hyperbolicity needs at least 4 nodes");
  if (options.mode == DeltaMode::Exact) return delta_from_distances(all_pairs_distances(g), n);

  Rng rng(derive_seed(options.seed, 0x64656c7461ULL));
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  const std::size_t p = std::max<std::size_t>(4, std::min(n, options.pool_size));
  if (p < n) {
    for (std::size_t i = 0; i < p; ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
    }
    pool.resize(p);
    std::sort(pool.begin(), pool.end());
  }

  std::vector<std::int32_t> dist(p * p);
  const auto pp = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t a = 0; a < pp; ++a) {
    const auto full = bfs_distances(g, pool[static_cast<std::size_t>(a)]);
    for (std::size_t b = 0; b < p; ++b) dist[static_cast<std::size_t>(a) * p + b] = full[static_cast<std::size_t>(pool[b])];
  }
  require_connected(dist);

  if (options.n_samples >= choose4(p)) {
    DeltaResult r = delta_from_distances(dist, p);
    r.exhaustive = p == n;
    return r;
  }

  // Quadruples are drawn serially so the sample set depends only on the seed.
  const std::size_t m = options.n_samples;
  std::vector<std::uint32_t> quads(4 * m);
  for (std::size_t s = 0; s < m; ++s) {
    std::uint32_t* q = &quads[4 * s];
    for (int k = 0; k < 4; ++k) {
      std::uint32_t v;
      bool fresh;
      do {
        v = static_cast<std::uint32_t>(uniform_index(rng, p));
        fresh = std::find(q, q + k, v) == q + k;
      } while (!fresh);
      q[k] = v;
    }
  }
  double sum = 0.0;
  double max = 0.0;
  const auto mm = static_cast<std::ptrdiff_t>(m);
  const auto d = [&](std::uint32_t a, std::uint32_t b) { return static_cast<double>(dist[a * p + b]); };
#pragma omp parallel for schedule(static) reduction(+ : sum) reduction(max : max)
  for (std::ptrdiff_t s = 0; s < mm; ++s) {
    const std::uint32_t* q = &quads[4 * static_cast<std::size_t>(s)];
    const double delta = four_point_delta(d(q[0], q[1]), d(q[2], q[3]), d(q[0], q[2]),
                                          d(q[1], q[3]), d(q[0], q[3]), d(q[1], q[2]));
    sum += delta;
    max = std::max(max, delta);
  }
  DeltaResult r;
  r.quadruples = m;
  r.mean = sum / static_cast<double>(m);
  r.max = max;
  r.pool = p;
  r.exhaustive = false;
  return r;
}

NodeMeasure neighbour_measure(const SimpleGraph& g, NodeId v, const CurvatureOptions& options) {
  if (!(options.alpha >= 0.0 && options.alpha < 1.0)) {
    throw std::invalid_argument("idleness alpha must lie in [0, 1)");
  }
  NodeMeasure m;
  const auto& nbrs = g.adjacency[static_cast<std::size_t>(v)];
  if (nbrs.empty()) {
    m.support = {v};
    m.mass = {1.0};
    return m;
  }
  const bool idle = options.alpha > 0.0;
  const std::size_t room = options.support_cap - (idle ? 1 : 0);
  std::vector<NodeId> chosen = nbrs;
  if (chosen.size() > room) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(v)));
    for (std::size_t i = 0; i < room; ++i) {
      std::swap(chosen[i], chosen[i + uniform_index(rng, chosen.size() - i)]);
    }
    chosen.resize(room);
    std::sort(chosen.begin(), chosen.end());
    m.subsampled = true;
  }
  if (idle) {
    m.support.push_back(v);
    m.mass.push_back(options.alpha);
  }
  const double share = (1.0 - options.alpha) / static_cast<double>(chosen.size());
  for (NodeId w : chosen) {
    m.support.push_back(w);
    m.mass.push_back(share);
  }
  return m;
}

double ollivier_ricci_edge(const SimpleGraph& g, NodeId x, NodeId y, const CurvatureOptions& options) {
  if (x == y || !g.has_edge(x, y)) throw std::invalid_argument("ollivier_ricci_edge: not an edge");
  const NodeMeasure mx = neighbour_measure(g, x, options);
  const NodeMeasure my = neighbour_measure(g, y, options);
  Matrix cost(mx.support.size(), my.support.size());
  for (std::size_t i = 0; i < mx.support.size(); ++i) {
    for (std::size_t j = 0; j < my.support.size(); ++j) {
      cost(i, j) = short_distance(g, mx.support[i], my.support[j]);
    }
  }
  return 1.0 - wasserstein1(mx.mass, my.mass, cost, options.support_cap);
}

CurvatureReport edge_curvatures(const SimpleGraph& g, const CurvatureOptions& options) {
  CurvatureReport report;
  report.alpha = options.alpha;
  report.support_cap = options.support_cap;
  const auto edges = g.edges();
  report.edges.resize(edges.size());
  const auto ne = static_cast<std::ptrdiff_t>(edges.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t e = 0; e < ne; ++e) {
    const auto [u, v] = edges[static_cast<std::size_t>(e)];
    report.edges[static_cast<std::size_t>(e)] = {u, v, ollivier_ricci_edge(g, u, v, options)};
  }
  std::vector<double> sum(g.node_count(), 0.0);
  for (const auto& e : report.edges) {
    sum[static_cast<std::size_t>(e.u)] += e.kappa;
    sum[static_cast<std::size_t>(e.v)] += e.kappa;
  }
  report.node_kappa.resize(g.node_count(), 0.0);
  const std::size_t room = options.support_cap - (options.alpha > 0.0 ? 1 : 0);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const std::size_t deg = g.adjacency[v].size();
    if (deg > 0) report.node_kappa[v] = sum[v] / static_cast<double>(deg);
    if (deg > room) ++report.subsampled_nodes;
  }
  return report;
}

double density_from_counts(std::size_t nodes, std::size_t edges) {
  if (nodes < 2) return 0.0;
  return static_cast<double>(edges) /
         (static_cast<double>(nodes) * static_cast<double>(nodes - 1));
}

double avg_degree_from_counts(std::size_t nodes, std::size_t edges) {
  if (nodes == 0) return 0.0;
  return 2.0 * static_cast<double>(edges) / static_cast<double>(nodes);
}

GraphReport graph_stats(const SimpleGraph& g, const DeltaOptions& delta,
                        const CurvatureOptions& curvature) {
  GraphReport r;
  r.stats.nodes = g.node_count();
  r.stats.edges = g.edge_count();
  r.stats.density = density_from_counts(r.stats.nodes, r.stats.edges);
  r.stats.avg_degree = avg_degree_from_counts(r.stats.nodes, r.stats.edges);
  r.delta = delta_hyperbolicity(g, delta);
  r.stats.delta_mean = r.delta.mean;
  r.stats.delta_max = r.delta.max;
  r.curvature = edge_curvatures(g, curvature);
  return r;
}

}  // namespace hyprec
