#pragma once

// Knowledge-graph scoring functions and their parameter store. Every model
// shares score(h, r, t) -> real, higher meaning more plausible. Hyperbolic
// parameters are stored as tangent vectors at the origin and mapped into the
// ball with exp0 when scored.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyprec/knowledge_graph.hpp"
#include "hyprec/matrix.hpp"

namespace hyprec {

enum class ModelKind { TransE, TransH, DistMul, RotatE, MuRE, MuRP, RotRefE, RotRefH };

enum class Space { Euclidean, Complex, Hyperbolic };

std::span<const ModelKind> all_model_kinds();
std::string_view to_string(ModelKind kind);
std::string_view to_string(Space space);
std::optional<ModelKind> parse_model_kind(std::string_view name);
Space space_of(ModelKind kind);
bool uses_entity_bias(ModelKind kind);
bool requires_even_dim(ModelKind kind);

enum class RelTensor : std::size_t {
  Translation,
  Diag,
  Phase,
  GivensRot,
  GivensRef,
  Attention,
  Hyperplane,
};
inline constexpr std::size_t kRelTensorCount = 7;

std::string_view rel_tensor_name(RelTensor t);
// Columns of relation tensor `t` for this model, 0 when the model does not use it.
std::size_t rel_tensor_cols(ModelKind kind, RelTensor t, std::size_t dim);

struct ParameterStore {
  ModelKind kind = ModelKind::TransE;
  std::size_t dim = 0;
  Matrix entity_emb;   // |E| x d
  Matrix entity_bias;  // |E| x 1, bias models only
  std::array<Matrix, kRelTensorCount> rel;

  std::size_t n_entities() const { return entity_emb.rows; }
  std::size_t n_relations() const;

  Matrix& relation(RelTensor t) { return rel[static_cast<std::size_t>(t)]; }
  const Matrix& relation(RelTensor t) const { return rel[static_cast<std::size_t>(t)]; }

  // Visits the non-empty tensors in a fixed order with their serialized names.
  template <class F>
  void for_each_tensor(F&& f) {
    visit(*this, f);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    visit(*this, f);
  }

  bool operator==(const ParameterStore&) const = default;

 private:
  template <class Self, class F>
  static void visit(Self& self, F& f) {
    if (!self.entity_emb.empty()) f(std::string_view("entity_emb"), self.entity_emb);
    if (!self.entity_bias.empty()) f(std::string_view("entity_bias"), self.entity_bias);
    for (std::size_t i = 0; i < kRelTensorCount; ++i) {
      if (!self.rel[i].empty()) f(rel_tensor_name(static_cast<RelTensor>(i)), self.rel[i]);
    }
  }
};

// Zero-filled store with the layout of `kind`. Throws std::invalid_argument on
// d < 2 or odd d for rotation models.
ParameterStore make_store(ModelKind kind, std::size_t n_entities, std::size_t n_relations,
                          std::size_t dim);
ParameterStore zeros_like(const ParameterStore& store);

// Embeddings ~ N(0, 0.001^2), diagonal scales ~ 1 + N(0, 0.001^2), angles ~ U(-pi, pi),
// hyperplane normals uniform on the sphere, biases 0. Deterministic in `seed`.
ParameterStore init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations,
                           std::size_t dim, std::uint64_t seed);

using NamedTensors = std::map<std::string, Matrix>;
NamedTensors to_named_tensors(const ParameterStore& store);
ParameterStore from_named_tensors(ModelKind kind, std::size_t dim, const NamedTensors& tensors);

// Renormalizes TransH hyperplane rows to unit length.
void normalize_hyperplanes(ParameterStore& store);

using ConstVec = std::span<const double>;

// Block-diagonal Givens maps on consecutive coordinate pairs.
void givens_rotate(ConstVec angles, ConstVec x, std::span<double> out);
void givens_reflect(ConstVec angles, ConstVec x, std::span<double> out);
Matrix givens_matrix(ConstVec angles, bool reflection);

// Individual scorers on materialized parameters.
double score_transe(ConstVec h, ConstVec r, ConstVec t);
// Requires |w| = 1 within 1e-9; throws std::invalid_argument otherwise.
double score_transh(ConstVec h, ConstVec w, ConstVec r, ConstVec t);
double score_distmul(ConstVec h, ConstVec r, ConstVec t);
// Entities are d/2 interleaved complex pairs (re, im).
double score_rotate(ConstVec h, ConstVec phases, ConstVec t);
double score_mure(ConstVec h, ConstVec diag, ConstVec r, ConstVec t, double bh, double bt);
// h, r, t are ball points.
double score_murp(ConstVec h, ConstVec diag, ConstVec r, ConstVec t, double bh, double bt);
// h is a tangent/Euclidean vector; in Hyperbolic space r and t are ball points.
double score_rotref(ConstVec h, ConstVec rot, ConstVec ref, ConstVec attn, ConstVec r, ConstVec t,
                    double bh, double bt, Space space);

// Materializes the triple's parameters and dispatches. Throws std::out_of_range on bad ids.
double score(const ParameterStore& store, const Triple& triple);

// Gradient of one score with respect to the rows it touches.
struct TripleGrad {
  std::vector<double> head;
  std::vector<double> tail;
  double head_bias = 0.0;
  double tail_bias = 0.0;
  std::array<std::vector<double>, kRelTensorCount> rel;

  // Sizes the buffers for `store` and zeroes them.
  void reset(const ParameterStore& store);
};

// Returns score(store, triple) and overwrites `grad` with its gradient.
double score_with_gradient(const ParameterStore& store, const Triple& triple, TripleGrad& grad);

// Worst relative error between analytic gradients and central differences over
// every parameter the triple touches. Relative error is |a - n| / max(|a|, |n|, 1), so
// near-zero gradients are compared absolutely.
double finite_difference_check(const ParameterStore& store, const Triple& triple, double step);

}  // namespace hyprec
