#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "hyprec/hyperbolic.hpp"
#include "hyprec/kg_models.hpp"

using namespace hyprec;

namespace {

using V = std::vector<double>;

ParameterStore random_store(ModelKind kind, std::size_t dim, std::uint64_t seed, double scale) {
  ParameterStore s = init_params(kind, 4, 2, dim, seed);
  std::mt19937_64 rng(seed * 7 + 1);
  std::normal_distribution<double> n(0.0, scale);
  s.for_each_tensor([&](std::string_view name, Matrix& m) {
    if (name == "rel_hyperplane") return;
    for (double& x : m.data) x += n(rng);
  });
  return s;
}

}  // namespace

TEST_CASE("init_params follows the layout and is deterministic") {
  CHECK(init_params(ModelKind::TransE, 3, 1, 4, 9) == init_params(ModelKind::TransE, 3, 1, 4, 9));
  CHECK_THROWS_AS(init_params(ModelKind::RotatE, 3, 1, 5, 9), std::invalid_argument);
  CHECK_THROWS_AS(init_params(ModelKind::RotRefH, 3, 1, 7, 9), std::invalid_argument);
  CHECK_THROWS_AS(init_params(ModelKind::TransE, 3, 1, 1, 9), std::invalid_argument);
  const auto murp = init_params(ModelKind::MuRP, 10, 2, 8, 3);
  for (double b : murp.entity_bias.data) CHECK(b == 0.0);
  CHECK(murp.relation(RelTensor::Diag).cols == 8);
  const auto transh = init_params(ModelKind::TransH, 3, 4, 6, 1);
  for (std::size_t r = 0; r < 4; ++r) CHECK(ball::norm(transh.relation(RelTensor::Hyperplane).row(r)) == doctest::Approx(1.0));
  const auto rot = init_params(ModelKind::RotatE, 2, 3, 6, 1);
  CHECK(rot.relation(RelTensor::Phase).cols == 3);
  for (double a : rot.relation(RelTensor::Phase).data) CHECK(std::abs(a) <= std::numbers::pi);
}

TEST_CASE("scorer examples") {
  CHECK(score_transe(V{0, 0}, V{0, 0}, V{3, 4}) == -5.0);
  CHECK(score_transe(V{1, 2}, V{0.5, -1}, V{1.5, 1}) == 0.0);
  CHECK(score_transe(V{1.5, 2.5}, V{0.5, -1}, V{2, 1.5}) == score_transe(V{1, 2}, V{0.5, -1}, V{1.5, 1}));

  CHECK(score_transh(V{1, 0}, V{1, 0}, V{0, 0}, V{0, 1}) == doctest::Approx(-1.0));
  CHECK(score_transh(V{0.6, 0.8}, V{0.6, 0.8}, V{0, 0}, V{0.6, 0.8}) == doctest::Approx(0.0));
  CHECK(score_transh(V{0, 1}, V{1, 0}, V{0.5, 0}, V{0, 2}) == score_transe(V{0, 1}, V{0.5, 0}, V{0, 2}));
  CHECK_THROWS_AS(score_transh(V{1, 0}, V{2, 0}, V{0, 0}, V{0, 1}), std::invalid_argument);
  {
    const V w{0.6, 0.8}, h{0.3, -1.2}, r{0.1, 0.4}, t{-0.7, 0.5};
    V h2 = h, t2 = t;
    for (int i = 0; i < 2; ++i) {
      h2[i] += 3.7 * w[i];
      t2[i] -= 1.9 * w[i];
    }
    CHECK(std::abs(score_transh(h2, w, r, t2) - score_transh(h, w, r, t)) <= 1e-10);
  }

  CHECK(score_distmul(V{1, 2}, V{1, 1}, V{1, 1}) == 3.0);
  CHECK(score_distmul(V{0, 0}, V{1, 1}, V{1, 1}) == 0.0);
  CHECK(score_distmul(V{1, 2}, V{3, -1}, V{0.5, 4}) == score_distmul(V{0.5, 4}, V{3, -1}, V{1, 2}));

  CHECK(score_rotate(V{1, 0}, V{std::numbers::pi / 2}, V{0, 1}) == doctest::Approx(0.0));
  CHECK(score_rotate(V{1, 2, 3, 4}, V{0, 0}, V{0, 0, 0, 0}) ==
        doctest::Approx(-std::sqrt(30.0)));

  CHECK(score_mure(V{1, 1}, V{2, 1}, V{0, 0}, V{0, 0}, 0, 0) == -5.0);
  CHECK(score_mure(V{0.3, 0.2}, V{1, 1}, V{0, 0}, V{0.3, 0.2}, 0, 0) == 0.0);
  CHECK(score_mure(V{1, 1}, V{2, 1}, V{0, 0}, V{0, 0}, 1, 2) == -2.0);

  CHECK(score_murp(V{0, 0}, V{1, 1}, V{0, 0}, V{0.5, 0}, 0, 0) ==
        doctest::Approx(-std::pow(1.0986122886681098, 2)).epsilon(1e-13));
  CHECK(score_murp(V{0.2, 0.3}, V{1, 1}, V{0, 0}, V{0.2, 0.3}, 0, 0) == doctest::Approx(0.0));
  {
    // Degenerates to -d(h, t)^2 + biases for identity diag and zero translation.
    const auto h = BallPoint::from_coords({0.1, -0.4});
    const auto t = BallPoint::from_coords({-0.3, 0.2});
    const double d = hyperbolic_distance(h, t);
    CHECK(score_murp(h.coords(), V{1, 1}, V{0, 0}, t.coords(), 0.5, -0.25) ==
          doctest::Approx(-d * d + 0.25).epsilon(1e-12));
  }

  // Angles 0 and vanishing odd coordinates: both Givens candidates equal h.
  CHECK(score_rotref(V{0.4, 0, -0.3, 0}, V{0, 0}, V{0, 0}, V{1, 2, 3, 4}, V{0, 0, 0, 0}, V{0.4, 0, -0.3, 0}, 0, 0,
                     Space::Euclidean) == doctest::Approx(0.0));
}

TEST_CASE("Givens blocks are orthogonal isometries") {
  const V angles{0.3, -2.0, 1.1};
  for (bool reflection : {false, true}) {
    const Matrix g = givens_matrix(angles, reflection);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 6; ++k) s += g(k, i) * g(k, j);
        CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }
  const V h{0.3, 1.2, -0.5, 0.8, 2.0, -1.0};
  V out(6);
  givens_rotate(angles, h, out);
  CHECK(ball::norm(out) == doctest::Approx(ball::norm(h)).epsilon(1e-14));
  givens_reflect(angles, h, out);
  CHECK(ball::norm(out) == doctest::Approx(ball::norm(h)).epsilon(1e-14));
}

TEST_CASE("RotatE preserves moduli per complex coordinate") {
  const V h{0.3, -1.2, 2.0, 0.5};
  const V phases{0.9, -2.5};
  V out(4);
  // Rotation with zero translation and t = 0 reads off |h o r|.
  for (std::size_t j = 0; j < 2; ++j) {
    const double re = h[2 * j] * std::cos(phases[j]) - h[2 * j + 1] * std::sin(phases[j]);
    const double im = h[2 * j] * std::sin(phases[j]) + h[2 * j + 1] * std::cos(phases[j]);
    CHECK(std::hypot(re, im) == doctest::Approx(std::hypot(h[2 * j], h[2 * j + 1])).epsilon(1e-15));
  }
  CHECK(score_rotate(h, phases, V{0, 0, 0, 0}) == doctest::Approx(-ball::norm(h)).epsilon(1e-14));
}

TEST_CASE("dispatch matches the individual scorers") {
  auto s = random_store(ModelKind::TransE, 4, 3, 0.5);
  const Triple tr{1, 0, 2};
  CHECK(score(s, tr) == score_transe(s.entity_emb.row(1), s.relation(RelTensor::Translation).row(0), s.entity_emb.row(2)));
  CHECK(score(s, tr) == score(s, tr));
  CHECK_THROWS_AS(score(s, Triple{9, 0, 1}), std::out_of_range);
  CHECK_THROWS_AS(score(s, Triple{0, 5, 1}), std::out_of_range);

  auto m = random_store(ModelKind::MuRP, 4, 3, 0.5);
  V h(4), t(4), r(4);
  ball::expmap0(m.entity_emb.row(1), h);
  ball::expmap0(m.entity_emb.row(2), t);
  ball::expmap0(m.relation(RelTensor::Translation).row(0), r);
  CHECK(ball::norm(h) < 1.0);
  CHECK(score(m, tr) == doctest::Approx(score_murp(h, m.relation(RelTensor::Diag).row(0), r, t,
                                                   m.entity_bias(1, 0), m.entity_bias(2, 0)))
                            .epsilon(1e-14));
}

TEST_CASE("all scorers are finite on large parameters") {
  for (ModelKind kind : all_model_kinds()) {
    const auto s = random_store(kind, 8, 17, 25.0);
    for (EntityId a = 0; a < 4; ++a) {
      for (EntityId b = 0; b < 4; ++b) CHECK(std::isfinite(score(s, Triple{a, 1, b})));
    }
  }
}

TEST_CASE("analytic gradients match central differences for every model") {
  for (ModelKind kind : all_model_kinds()) {
    CAPTURE(to_string(kind));
    double worst = 0.0;
    for (std::size_t dim : {4u, 8u}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_store(kind, dim, seed, 0.4);
        const Triple tr{static_cast<EntityId>(seed % 4), static_cast<RelationId>(seed % 2),
                        static_cast<EntityId>((seed + 1) % 4)};
        worst = std::max(worst, finite_difference_check(s, tr, 1e-5));
      }
    }
    CHECK(worst < 1e-4);
  }
  // Linear in every block: rounding level only.
  const auto d = random_store(ModelKind::DistMul, 8, 2, 0.5);
  CHECK(finite_difference_check(d, Triple{0, 1, 2}, 1e-5) < 1e-9);
}

TEST_CASE("central differences converge at second order") {
  // MuRE is quadratic, so central differences are exact there; MuRP is not.
  const auto s = random_store(ModelKind::MuRP, 4, 4, 0.8);
  const Triple tr{0, 1, 3};
  const double e1 = finite_difference_check(s, tr, 1e-2);
  const double e2 = finite_difference_check(s, tr, 5e-3);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("named tensors round-trip and validate") {
  for (ModelKind kind : all_model_kinds()) {
    const auto s = random_store(kind, 6, 1, 0.3);
    const auto named = to_named_tensors(s);
    CHECK(from_named_tensors(kind, 6, named) == s);
    auto broken = named;
    broken.begin()->second = Matrix(1, 1);
    CHECK_THROWS_AS(from_named_tensors(kind, 6, broken), std::invalid_argument);
    auto extra = named;
    extra["unexpected"] = Matrix(1, 1);
    CHECK_THROWS_AS(from_named_tensors(kind, 6, extra), std::invalid_argument);
  }
}
