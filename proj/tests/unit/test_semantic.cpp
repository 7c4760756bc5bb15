#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hyprec/errors.hpp"
#include "hyprec/reference.hpp"
#include "hyprec/semantic.hpp"

using namespace hyprec;

namespace {

// Three unit vectors with prescribed pairwise cosines.
ItemEmbeddingTable three_items(double ab, double ac, double bc) {
  const double a[3] = {1.0, 0.0, 0.0};
  const double b[3] = {ab, std::sqrt(1.0 - ab * ab), 0.0};
  const double c1 = ac;
  const double c2 = (bc - ab * ac) / b[1];
  const double c[3] = {c1, c2, std::sqrt(1.0 - c1 * c1 - c2 * c2)};
  ItemEmbeddingTable t;
  t.add("A", {a[0], a[1], a[2]});
  t.add("B", {b[0], b[1], b[2]});
  t.add("C", {c[0], c[1], c[2]});
  return pool_item_embeddings(std::move(t));
}

ItemEmbeddingTable random_table(std::size_t n, std::size_t d, std::uint64_t seed, bool shuffle_names = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto vectors = [&] {
    std::vector<std::vector<double>> vs(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) vs[i][k] = g(rng) + (k == i % 3 ? 2.0 : 0.0);
    }
    return vs;
  }();
  if (shuffle_names) std::shuffle(order.begin(), order.end(), rng);
  ItemEmbeddingTable t;
  for (std::size_t i : order) t.add("item" + std::to_string(i), vectors[i]);
  return pool_item_embeddings(std::move(t));
}

std::set<std::pair<std::string, std::string>> pairs_of(const SimilarityEdgeSet& s) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : s.edges) out.insert(std::minmax(e.item_a, e.item_b));
  return out;
}

}  // namespace

TEST_CASE("pooling takes the mean of each item's vectors") {
  ItemEmbeddingTable t;
  t.add("x", {1.0, 0.0});
  t.add("x", {0.0, 1.0});
  t.add("y", {2.0, 3.0});
  const auto p = pool_item_embeddings(t);
  CHECK(p.pooled.at("x") == std::vector<double>{0.5, 0.5});
  CHECK(p.pooled.at("y") == std::vector<double>{2.0, 3.0});
  CHECK_THROWS_AS(t.add("z", {1.0}), std::invalid_argument);
}

TEST_CASE("cosine similarity examples") {
  const std::vector<double> a{1.0, 0.0}, b{1.0, 1.0}, c{0.0, 2.0};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, c) == 0.0);
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("global top-K selection on the three-item fixture") {
  // These similarities admit no Gram matrix, so they go straight to the selection stage.
  using detail::Candidate;
  const std::vector<std::string> names{"A", "B", "C"};
  const std::vector<std::vector<Candidate>> rows{{{0.9, 1}}, {{0.95, 2}}, {}};
  const auto s = detail::assemble_edges(names, rows, 0.6, 2, TopKMode::Global);
  REQUIRE(s.edges.size() == 2);
  CHECK(s.edges[0] == SimilarityEdge{"B", "C", 0.95});
  CHECK(s.edges[1] == SimilarityEdge{"A", "B", 0.9});
  CHECK(detail::assemble_edges(names, rows, 0.6, 1, TopKMode::Global).edges.size() == 1);
}

TEST_CASE("global top-K mining on realizable cosines") {
  const auto t = three_items(0.9, 0.5, 0.75);
  const auto s = mine_semantic_edges(t, 0.6, 2, TopKMode::Global);
  REQUIRE(s.edges.size() == 2);
  CHECK(std::minmax(s.edges[0].item_a, s.edges[0].item_b) == std::minmax(std::string("A"), std::string("B")));
  CHECK(s.edges[0].similarity == doctest::Approx(0.9));
  CHECK(std::minmax(s.edges[1].item_a, s.edges[1].item_b) == std::minmax(std::string("B"), std::string("C")));
  CHECK(s.edges[1].similarity == doctest::Approx(0.75));
  CHECK(mine_semantic_edges(t, 0.6, 1, TopKMode::Global).edges.size() == 1);
  CHECK(mine_semantic_edges(t, 1.01, 2, TopKMode::Global).edges.empty());
  CHECK(mine_semantic_edges(t, 0.0, 0, TopKMode::PerItem).edges.empty());
}

TEST_CASE("per-item mode bounds out-degree and never repeats a pair") {
  const auto t = random_table(40, 6, 3);
  const auto s = mine_semantic_edges(t, 0.2, 3, TopKMode::PerItem);
  std::map<std::string, int> out_degree;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : s.edges) {
    CHECK(e.item_a != e.item_b);
    CHECK(e.similarity >= 0.2);
    CHECK(seen.insert(std::minmax(e.item_a, e.item_b)).second);
    ++out_degree[e.item_a];
  }
  for (const auto& [item, k] : out_degree) CHECK(k <= 3);
  for (std::size_t i = 1; i < s.edges.size(); ++i) CHECK(s.edges[i - 1].similarity >= s.edges[i].similarity);
}

TEST_CASE("blocked parallel mining matches the serial reference") {
  for (TopKMode mode : {TopKMode::Global, TopKMode::PerItem}) {
    const auto t = random_table(120, 5, 9);
    const auto ref = reference::mine_semantic_edges(t, 0.3, 25, mode);
    MiningOptions tiny;
    tiny.memory_budget_bytes = 8 * 120 * 7;  // forces many row blocks
    for (const auto& opts : {MiningOptions{}, tiny}) {
      const auto s = mine_semantic_edges(t, 0.3, 25, mode, opts);
      CHECK(pairs_of(s) == pairs_of(ref));
      REQUIRE(s.edges.size() == ref.edges.size());
      for (std::size_t i = 0; i < s.edges.size(); ++i) {
        CHECK(s.edges[i].similarity == doctest::Approx(ref.edges[i].similarity).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mining ignores the order items are supplied in") {
  const auto a = mine_semantic_edges(random_table(50, 4, 21, false), 0.4, 4, TopKMode::PerItem);
  const auto b = mine_semantic_edges(random_table(50, 4, 21, true), 0.4, 4, TopKMode::PerItem);
  CHECK(a.edges == b.edges);
}

TEST_CASE("merging semantic edges") {
  KnowledgeGraph g;
  g.add("u", "buy", "A");
  g.add("u", "buy", "B");
  const auto same = merge_semantic_edges(g, SimilarityEdgeSet{});
  CHECK(same.size() == g.size());
  SimilarityEdgeSet one;
  one.edges.push_back({"A", "B", 0.9});
  const auto merged = merge_semantic_edges(g, one);
  CHECK(merged.size() == g.size() + 1);
  CHECK(merged.contains(Triple{*merged.entities.find("A"), *merged.relations.find(kSemanticRelation),
                               *merged.entities.find("B")}));
  CHECK(merge_semantic_edges(merged, one).size() == merged.size());
  SimilarityEdgeSet unknown;
  unknown.edges.push_back({"A", "Z", 0.9});
  CHECK_THROWS_AS(merge_semantic_edges(g, unknown), InputError);
}

TEST_CASE("inverse relations double relations and triples") {
  KnowledgeGraph g;
  g.add("u", "buy", "i");
  g.add("i", "category", "c");
  g.add("u", "buy", "j");
  const auto inv = add_inverse_relations(g);
  CHECK(inv.relations.size() == 4);
  CHECK(inv.size() == 6);
  const auto buy_inv = inv.relations.find(inverse_relation_name("buy"));
  REQUIRE(buy_inv);
  CHECK(inv.contains(Triple{*inv.entities.find("i"), *buy_inv, *inv.entities.find("u")}));
}
