#include <doctest.h>

#include <stdexcept>

#include <random>

#include "hyprec/errors.hpp"
#include "hyprec/graph_geometry.hpp"
#include "hyprec/reference.hpp"

using namespace hyprec;

namespace {

using Edges = std::vector<std::pair<NodeId, NodeId>>;

SimpleGraph cycle(std::size_t n) {
  Edges e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n));
  return SimpleGraph::from_edges(n, e);
}

SimpleGraph complete(std::size_t n) {
  Edges e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  return SimpleGraph::from_edges(n, e);
}

SimpleGraph path(std::size_t n) {
  Edges e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  return SimpleGraph::from_edges(n, e);
}

SimpleGraph random_tree(std::size_t n, std::mt19937_64& rng) {
  Edges e;
  for (std::size_t v = 1; v < n; ++v) {
    e.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng)));
  }
  return SimpleGraph::from_edges(n, e);
}

SimpleGraph random_connected(std::size_t n, double p, std::mt19937_64& rng) {
  Edges e;
  for (std::size_t v = 1; v < n; ++v) {
    e.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng)));
  }
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  return SimpleGraph::from_edges(n, e);
}

DeltaOptions exact() {
  DeltaOptions o;
  o.mode = DeltaMode::Exact;
  return o;
}

}  // namespace

TEST_CASE("graph construction normalizes edges") {
  const auto g = SimpleGraph::from_edges(4, {{0, 1}, {1, 0}, {2, 2}, {1, 2}, {0, 1}});
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.edges() == Edges{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(SimpleGraph::from_edges(2, {{0, 5}}), std::out_of_range);
}

TEST_CASE("largest component and collapse") {
  const auto g = SimpleGraph::from_edges(7, {{0, 1}, {2, 3}, {3, 4}, {5, 6}});
  const auto lcc = largest_connected_component(g);
  CHECK(lcc.node_count() == 3);
  CHECK(lcc.entity_of == std::vector<EntityId>{2, 3, 4});
  const auto tie = largest_connected_component(SimpleGraph::from_edges(4, {{2, 3}, {0, 1}}));
  CHECK(tie.entity_of == std::vector<EntityId>{0, 1});

  KnowledgeGraph kg;
  kg.add("u", "buy", "i");
  kg.add("i", "category", "u");
  kg.add("i", "category", "c");
  kg.add("c", "self", "c");
  kg.add("x", "buy", "y");
  const auto s = collapse_graph(kg);
  CHECK(s.node_count() == 3);
  CHECK(s.edge_count() == 2);
  KnowledgeGraph loops;
  loops.add("a", "r", "a");
  CHECK_THROWS_AS(collapse_graph(loops), InputError);
}

TEST_CASE("bfs distances") {
  const auto d = bfs_distances(path(5), 1);
  CHECK(d == std::vector<std::int32_t>{1, 0, 1, 2, 3});
  const auto split = SimpleGraph::from_edges(3, {{0, 1}});
  CHECK(bfs_distances(split, 0)[2] == -1);
}

TEST_CASE("four-point delta oracle values") {
  CHECK(delta_hyperbolicity(cycle(4), exact()).max == 1.0);
  CHECK(delta_hyperbolicity(complete(5), exact()).max == 0.0);
  CHECK(delta_hyperbolicity(path(4), exact()).max == 0.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto t = random_tree(4 + static_cast<std::size_t>(i), rng);
    const auto r = delta_hyperbolicity(t, exact());
    CHECK(r.max == 0.0);
    CHECK(r.mean == 0.0);
  }
  CHECK_THROWS_AS(delta_hyperbolicity(path(3), exact()), std::invalid_argument);
}

TEST_CASE("parallel exact delta equals the serial reference") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const auto g = random_connected(25, 0.08, rng);
    const auto a = delta_hyperbolicity(g, exact());
    const auto b = reference::delta_exact(g);
    CHECK(a.mean == b.mean);
    CHECK(a.max == b.max);
    CHECK(a.quadruples == b.quadruples);
  }
}

TEST_CASE("sampled delta with a full budget is exact; otherwise it is deterministic") {
  std::mt19937_64 rng(4);
  const auto g = random_connected(30, 0.06, rng);
  DeltaOptions full;
  full.n_samples = 1'000'000;
  const auto e = delta_hyperbolicity(g, exact());
  const auto s = delta_hyperbolicity(g, full);
  CHECK(s.exhaustive);
  CHECK(s.mean == e.mean);
  CHECK(s.max == e.max);

  DeltaOptions few;
  few.n_samples = 500;
  few.seed = 12;
  const auto a = delta_hyperbolicity(g, few);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.quadruples == 500);
  CHECK(a.mean == delta_hyperbolicity(g, few).mean);
  CHECK(a.max <= e.max);

  DeltaOptions pool;
  pool.pool_size = 10;
  pool.n_samples = 1'000'000;
  const auto p = delta_hyperbolicity(g, pool);
  CHECK(p.pool == 10);
  CHECK_FALSE(p.exhaustive);
}

TEST_CASE("Ollivier-Ricci oracle values") {
  const CurvatureOptions plain;
  const auto k3 = complete(3);
  for (const auto& [u, v] : k3.edges()) CHECK(ollivier_ricci_edge(k3, u, v, plain) == doctest::Approx(0.5).epsilon(1e-12));
  const auto p4 = path(4);
  CHECK(std::abs(ollivier_ricci_edge(p4, 1, 2, plain)) <= 1e-12);
  CHECK_THROWS_AS(ollivier_ricci_edge(p4, 0, 2, plain), std::invalid_argument);
  CurvatureOptions bad;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(ollivier_ricci_edge(p4, 0, 1, bad), std::invalid_argument);
  // K4: only the mass sitting on the other endpoint has to move.
  const auto k4 = complete(4);
  CHECK(ollivier_ricci_edge(k4, 0, 1, plain) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("edge curvatures match the serial reference") {
  std::mt19937_64 rng(15);
  const auto g = random_connected(40, 0.1, rng);
  for (double alpha : {0.0, 0.5}) {
    CurvatureOptions o;
    o.alpha = alpha;
    o.support_cap = 6;  // forces subsampling on high-degree nodes
    o.seed = 2;
    const auto a = edge_curvatures(g, o);
    const auto b = reference::edge_curvatures(g, o);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
      CHECK(a.edges[i].u == b.edges[i].u);
      CHECK(a.edges[i].kappa == doctest::Approx(b.edges[i].kappa).epsilon(1e-12));
    }
    CHECK(a.subsampled_nodes == b.subsampled_nodes);
    CHECK(a.subsampled_nodes > 0);
  }
}

TEST_CASE("neighbour measures respect the support cap") {
  const auto star = SimpleGraph::from_edges(10, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}, {0, 8}, {0, 9}});
  CurvatureOptions o;
  o.support_cap = 4;
  o.alpha = 0.25;
  const auto m = neighbour_measure(star, 0, o);
  CHECK(m.subsampled);
  CHECK(m.support.size() == 4);
  CHECK(m.support[0] == 0);
  double total = 0.0;
  for (double x : m.mass) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("density and average degree arithmetic") {
  CHECK(density_from_counts(4, 3) == doctest::Approx(0.25));
  CHECK(avg_degree_from_counts(4, 3) == doctest::Approx(1.5));
  CHECK(100.0 * density_from_counts(38150, 219156) == doctest::Approx(0.015).epsilon(0.01));
  CHECK(avg_degree_from_counts(40396, 406237) == doctest::Approx(20.1).epsilon(0.005));
  const auto r = graph_stats(cycle(6), exact(), {});
  CHECK(r.stats.nodes == 6);
  CHECK(r.stats.edges == 6);
  CHECK(r.stats.avg_degree == 2.0);
  CHECK(r.stats.delta_max == r.delta.max);
  CHECK(r.curvature.node_kappa.size() == 6);
}
