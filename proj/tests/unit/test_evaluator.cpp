#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <set>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/dataset.hpp"
#include "hyprec/errors.hpp"
#include "hyprec/evaluator.hpp"
#include "hyprec/parallel.hpp"
#include "hyprec/reference.hpp"
#include "planted_graph.hpp"

using namespace hyprec;

namespace {

// users u0..u{n-1}; user k buys k+3 items from a pool of `items`.
KnowledgeGraph graded_users(std::size_t n, std::size_t items) {
  KnowledgeGraph g;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < u % 7 + 3; ++j) {
      g.add("u" + std::to_string(u), "buy", "i" + std::to_string((u * 13 + j * 5) % items));
    }
  }
  return g;
}

std::set<EntityId> items_of(const KnowledgeGraph& g, EntityId user) {
  std::set<EntityId> s;
  for (const auto& t : g.triples()) {
    if (t.head == user) s.insert(t.tail);
  }
  return s;
}

}  // namespace

TEST_CASE("candidate negatives exclude everything the user touched") {
  const KnowledgeGraph g = graded_users(60, 400);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Test, 3);
  REQUIRE(c.queries.size() == 60);
  CHECK(c.short_lists == 0);
  for (std::size_t i = 1; i < c.queries.size(); ++i) CHECK(c.queries[i - 1].user < c.queries[i].user);
  for (const auto& q : c.queries) {
    const auto touched = items_of(g, q.user);
    CHECK(q.negatives.size() == kEvalNegatives);
    CHECK(std::set<EntityId>(q.negatives.begin(), q.negatives.end()).size() == kEvalNegatives);
    for (EntityId n : q.negatives) {
      CHECK_FALSE(touched.contains(n));
      CHECK(std::binary_search(s.items.begin(), s.items.end(), n));
    }
  }
  const auto again = build_candidates(s, EvalSplit::Test, 3);
  for (std::size_t i = 0; i < c.queries.size(); ++i) CHECK(again.queries[i].negatives == c.queries[i].negatives);
  const auto other = build_candidates(s, EvalSplit::Test, 4);
  CHECK(other.queries[0].negatives != c.queries[0].negatives);
}

TEST_CASE("small item universes produce flagged short lists") {
  const KnowledgeGraph g = graded_users(10, 50);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Dev, 0);
  CHECK(c.short_lists == c.queries.size());
  for (const auto& q : c.queries) {
    CHECK(q.short_list);
    CHECK(q.negatives.size() == s.items.size() - items_of(g, q.user).size());
  }
}

TEST_CASE("rank and DCG examples") {
  std::vector<double> negs(100);
  for (std::size_t i = 0; i < negs.size(); ++i) negs[i] = static_cast<double>(i) / 100.0;
  CHECK(rank_ground_truth(5.0, negs) == 1);
  CHECK(rank_ground_truth(0.975, negs) == 3);
  CHECK(rank_ground_truth(-1.0, negs) == 101);
  // Ties count against the ground truth.
  CHECK(rank_ground_truth(0.5, negs) == 51);
  CHECK(rank_ground_truth(0.5, std::vector<double>(100, 0.5)) == 101);
  CHECK_THROWS_AS(rank_ground_truth(NAN, negs), NumericalError);
  negs[7] = INFINITY;
  CHECK_THROWS_AS(rank_ground_truth(0.0, negs), NumericalError);
  CHECK_THROWS_AS(rank_ground_truth(0.0, {}), std::invalid_argument);

  CHECK(dcg_at_10(1) == 1.0);
  CHECK(dcg_at_10(3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dcg_at_10(10) == doctest::Approx(1.0 / std::log2(11.0)));
  CHECK(dcg_at_10(11) == 0.0);
  CHECK(dcg_at_10(101) == 0.0);

  const std::vector<int> ranks{1, 3, 11, 101};
  const auto m = metrics_at_10(ranks);
  CHECK(m.n_users == 4);
  CHECK(m.hr10 == 0.5);
  CHECK(m.dcg10 == doctest::Approx(0.375));
  CHECK(metrics_at_10({}).n_users == 0);
}

TEST_CASE("cold slice takes ceil(2%) of users with fewest train interactions") {
  const KnowledgeGraph g = graded_users(100, 400);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Test, 0);
  const auto cold = cold_slice(s, c.queries);
  REQUIRE(cold.size() == 2);
  // u0 and u7 both keep one train purchase; ties resolve by entity id.
  CHECK(g.entities.name(cold[0]) == "u0");
  CHECK(g.entities.name(cold[1]) == "u7");
  std::vector<EvalQuery> first51(c.queries.begin(), c.queries.begin() + 51);
  CHECK(cold_slice(s, first51).size() == 2);
  std::vector<EvalQuery> first50(c.queries.begin(), c.queries.begin() + 50);
  CHECK(cold_slice(s, first50).size() == 1);
}

TEST_CASE("random scores give the chance hit rate") {
  const KnowledgeGraph g = graded_users(2000, 1500);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Test, 1);
  const auto ranks = rank_queries(c, [](EntityId u, EntityId i) { return random_score(11, u, i); });
  const auto m = metrics_at_10(ranks);
  CHECK(m.hr10 == doctest::Approx(10.0 / 101.0).epsilon(0.2));
  CHECK(random_score(11, 3, 4) == random_score(11, 3, 4));
  CHECK(random_score(11, 3, 4) != random_score(12, 3, 4));
}

TEST_CASE("parallel ranking matches the serial reference") {
  const KnowledgeGraph g = graded_users(300, 900);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Dev, 2);
  const auto scorer = [](EntityId u, EntityId i) { return std::sin(0.37 * u + 1.3 * i); };
  const auto fast = rank_queries(c, scorer);
  CHECK(fast == reference::rank_queries(c, scorer));
  set_num_threads(1);
  CHECK(rank_queries(c, scorer) == fast);
  set_num_threads(0);
  // Strictly monotone transforms of the scores leave every rank unchanged.
  const auto mono = [&](EntityId u, EntityId i) { return std::exp(3.0 * scorer(u, i)) - 2.0; };
  CHECK(rank_queries(c, mono) == fast);
  CHECK_THROWS_AS(rank_queries(c, [](EntityId, EntityId) { return NAN; }), NumericalError);
}

TEST_CASE("report combines the overall and cold slices") {
  const KnowledgeGraph g = graded_users(100, 400);
  const SplitDataset s = split_leave_last_two(g);
  const auto c = build_candidates(s, EvalSplit::Test, 0);
  std::vector<int> ranks(c.queries.size(), 50);
  for (std::size_t i = 0; i < c.queries.size(); ++i) {
    const auto& name = g.entities.name(c.queries[i].user);
    if (name == "u0" || name == "u7") ranks[i] = 1;
  }
  const auto r = make_report(s, c, ranks);
  CHECK(r.all.n_users == 100);
  CHECK(r.all.hr10 == doctest::Approx(0.02));
  CHECK(r.cold.n_users == 2);
  CHECK(r.cold.hr10 == 1.0);
  CHECK(r.cold.dcg10 == 1.0);
}

TEST_CASE("spearman correlation") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{50, 40, 30, 20, 10};
  CHECK(spearman_correlation(a, b) == doctest::Approx(-1.0));
  CHECK(spearman_correlation(a, a) == doctest::Approx(1.0));
  const std::vector<double> pa{3, 1, 5, 2, 4}, pb{30, 50, 10, 40, 20};
  CHECK(spearman_correlation(pa, pb) == doctest::Approx(-1.0));
  // Ties take average ranks: ranks (1.5, 1.5, 3) vs (1, 2, 3).
  CHECK(spearman_correlation(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 3}) ==
        doctest::Approx(0.8660254037844386));
  CHECK(spearman_correlation(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(spearman_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spearman_correlation(a, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("hierarchy reconstruction walks toward the origin") {
  // Three levels along one ray per branch: leaves near the boundary, root near 0.
  std::vector<std::vector<double>> pts{
      {0.05, 0.0},  // 0 root
      {0.45, 0.05}, // 1 mid, branch a
      {0.05, 0.45}, // 2 mid, branch b
      {0.85, 0.1},  // 3 leaf under 1
      {0.1, 0.85},  // 4 leaf under 2
  };
  for (NormMetric m : {NormMetric::Euclidean, NormMetric::Hyperbolic}) {
    CHECK(reconstruct_hierarchy(pts, 3, m) == std::vector<std::size_t>{3, 1, 0});
    CHECK(reconstruct_hierarchy(pts, 4, m) == std::vector<std::size_t>{4, 2, 0});
    CHECK(reconstruct_hierarchy(pts, 0, m) == std::vector<std::size_t>{0});
  }
}
