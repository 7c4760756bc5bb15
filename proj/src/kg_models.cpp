#include "hyprec/kg_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/random.hpp"

namespace hyprec {

namespace {

constexpr std::array<ModelKind, 8> kAllKinds{ModelKind::TransE, ModelKind::TransH,
                                             ModelKind::DistMul, ModelKind::RotatE,
                                             ModelKind::MuRE, ModelKind::MuRP,
                                             ModelKind::RotRefE, ModelKind::RotRefH};

std::vector<double>& scratch(int slot, std::size_t n) {
  thread_local std::vector<double> buffers[12];
  auto& b = buffers[slot];
  b.assign(n, 0.0);
  return b;
}

ConstVec row(const Matrix& m, std::int32_t i) { return m.row(static_cast<std::size_t>(i)); }

double bias(const ParameterStore& s, std::int32_t e) {
  return s.entity_bias.empty() ? 0.0 : s.entity_bias(static_cast<std::size_t>(e), 0);
}

void check_ids(const ParameterStore& s, const Triple& t) {
  const auto ne = static_cast<std::int32_t>(s.n_entities());
  const auto nr = static_cast<std::int32_t>(s.n_relations());
  if (t.head < 0 || t.head >= ne || t.tail < 0 || t.tail >= ne) {
    throw std::out_of_range("entity id out of range");
  }
  if (t.relation < 0 || t.relation >= nr) throw std::out_of_range("relation id out of range");
}

void unit_normal(ConstVec w, std::span<double> out) {
  const double n = ball::norm(w);
  if (n == 0.0) throw std::invalid_argument("TransH hyperplane normal is zero");
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / n;
}

// Attention-weighted mix of the Givens rotation and reflection of h.
struct RotRefMix {
  std::vector<double>* q_rot;
  std::vector<double>* q_ref;
  std::vector<double>* q;
  double w_rot;
  double w_ref;
};

RotRefMix rotref_mix(ConstVec h, ConstVec rot, ConstVec ref, ConstVec attn, int slot) {
  const std::size_t d = h.size();
  auto& q_rot = scratch(slot, d);
  auto& q_ref = scratch(slot + 1, d);
  auto& q = scratch(slot + 2, d);
  givens_rotate(rot, h, q_rot);
  givens_reflect(ref, h, q_ref);
  const double l_rot = ball::dot(attn, q_rot);
  const double l_ref = ball::dot(attn, q_ref);
  const double m = std::max(l_rot, l_ref);
  const double e_rot = std::exp(l_rot - m);
  const double e_ref = std::exp(l_ref - m);
  const double w_rot = e_rot / (e_rot + e_ref);
  const double w_ref = e_ref / (e_rot + e_ref);
  for (std::size_t i = 0; i < d; ++i) q[i] = w_rot * q_rot[i] + w_ref * q_ref[i];
  return {&q_rot, &q_ref, &q, w_rot, w_ref};
}

void axpy(double a, ConstVec x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

std::span<const ModelKind> all_model_kinds() { return kAllKinds; }

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransE: return "TransE";
    case ModelKind::TransH: return "TransH";
    case ModelKind::DistMul: return "DistMul";
    case ModelKind::RotatE: return "RotatE";
    case ModelKind::MuRE: return "MuRE";
    case ModelKind::MuRP: return "MuRP";
    case ModelKind::RotRefE: return "RotRefE";
    case ModelKind::RotRefH: return "RotRefH";
  }
  return "?";
}

std::string_view to_string(Space space) {
  switch (space) {
    case Space::Euclidean: return "euclidean";
    case Space::Complex: return "complex";
    case Space::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (ModelKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Space space_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::RotatE: return Space::Complex;
    case ModelKind::MuRP:
    case ModelKind::RotRefH: return Space::Hyperbolic;
    default: return Space::Euclidean;
  }
}

bool uses_entity_bias(ModelKind kind) {
  return kind == ModelKind::MuRE || kind == ModelKind::MuRP || kind == ModelKind::RotRefE ||
         kind == ModelKind::RotRefH;
}

bool requires_even_dim(ModelKind kind) {
  return kind == ModelKind::RotatE || kind == ModelKind::RotRefE || kind == ModelKind::RotRefH;
}

std::string_view rel_tensor_name(RelTensor t) {
  switch (t) {
    case RelTensor::Translation: return "rel_translation";
    case RelTensor::Diag: return "rel_diag";
    case RelTensor::Phase: return "rel_phase";
    case RelTensor::GivensRot: return "rel_givens_rot";
    case RelTensor::GivensRef: return "rel_givens_ref";
    case RelTensor::Attention: return "rel_attention";
    case RelTensor::Hyperplane: return "rel_hyperplane";
  }
  return "?";
}

std::size_t rel_tensor_cols(ModelKind kind, RelTensor t, std::size_t dim) {
  switch (kind) {
    case ModelKind::TransE: return t == RelTensor::Translation ? dim : 0;
    case ModelKind::TransH:
      return (t == RelTensor::Translation || t == RelTensor::Hyperplane) ? dim : 0;
    case ModelKind::DistMul: return t == RelTensor::Diag ? dim : 0;
    case ModelKind::RotatE: return t == RelTensor::Phase ? dim / 2 : 0;
    case ModelKind::MuRE:
    case ModelKind::MuRP: return (t == RelTensor::Translation || t == RelTensor::Diag) ? dim : 0;
    case ModelKind::RotRefE:
    case ModelKind::RotRefH:
      if (t == RelTensor::GivensRot || t == RelTensor::GivensRef) return dim / 2;
      return (t == RelTensor::Translation || t == RelTensor::Attention) ? dim : 0;
  }
  return 0;
}

std::size_t ParameterStore::n_relations() const {
  for (const auto& m : rel) {
    if (m.cols > 0) return m.rows;
  }
  return 0;
}

ParameterStore make_store(ModelKind kind, std::size_t n_entities, std::size_t n_relations,
                          std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("embedding dimension must be >= 2");
  if (requires_even_dim(kind) && dim % 2 != 0) {
    throw std::invalid_argument(std::string(to_string(kind)) + " requires an even dimension");
  }
  ParameterStore s;
  s.kind = kind;
  s.dim = dim;
  s.entity_emb = Matrix(n_entities, dim);
  if (uses_entity_bias(kind)) s.entity_bias = Matrix(n_entities, 1);
  for (std::size_t i = 0; i < kRelTensorCount; ++i) {
    const std::size_t cols = rel_tensor_cols(kind, static_cast<RelTensor>(i), dim);
    if (cols > 0) s.rel[i] = Matrix(n_relations, cols);
  }
  return s;
}

ParameterStore zeros_like(const ParameterStore& store) {
  ParameterStore z = store;
  z.for_each_tensor([](std::string_view, Matrix& m) { std::fill(m.data.begin(), m.data.end(), 0.0); });
  return z;
}

ParameterStore init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations,
                           std::size_t dim, std::uint64_t seed) {
  ParameterStore s = make_store(kind, n_entities, n_relations, dim);
  Rng rng(seed);
  std::normal_distribution<double> small(0.0, 1e-3);
  std::normal_distribution<double> standard(0.0, 1.0);
  auto angle = [&rng] { return -std::numbers::pi + 2.0 * std::numbers::pi * uniform_unit(rng); };

  for (double& v : s.entity_emb.data) v = small(rng);
  for (std::size_t i = 0; i < kRelTensorCount; ++i) {
    Matrix& m = s.rel[i];
    switch (static_cast<RelTensor>(i)) {
      case RelTensor::Translation:
      case RelTensor::Attention:
        for (double& v : m.data) v = small(rng);
        break;
      case RelTensor::Diag:
        for (double& v : m.data) v = 1.0 + small(rng);
        break;
      case RelTensor::Phase:
      case RelTensor::GivensRot:
      case RelTensor::GivensRef:
        for (double& v : m.data) v = angle();
        break;
      case RelTensor::Hyperplane:
        for (double& v : m.data) v = standard(rng);
        break;
    }
  }
  normalize_hyperplanes(s);
  return s;
}

NamedTensors to_named_tensors(const ParameterStore& store) {
  NamedTensors out;
  store.for_each_tensor([&out](std::string_view name, const Matrix& m) { out.emplace(name, m); });
  return out;
}

ParameterStore from_named_tensors(ModelKind kind, std::size_t dim, const NamedTensors& tensors) {
  auto it = tensors.find("entity_emb");
  if (it == tensors.end()) throw std::invalid_argument("missing tensor entity_emb");
  const std::size_t n_entities = it->second.rows;
  std::size_t n_relations = 0;
  for (std::size_t i = 0; i < kRelTensorCount; ++i) {
    const auto rt = static_cast<RelTensor>(i);
    if (rel_tensor_cols(kind, rt, dim) == 0) continue;
    auto r = tensors.find(std::string(rel_tensor_name(rt)));
    if (r == tensors.end()) {
      throw std::invalid_argument("missing tensor " + std::string(rel_tensor_name(rt)));
    }
    n_relations = r->second.rows;
    break;
  }
  ParameterStore s = make_store(kind, n_entities, n_relations, dim);
  std::size_t matched = 0;
  s.for_each_tensor([&](std::string_view name, Matrix& m) {
    auto t = tensors.find(std::string(name));
    if (t == tensors.end()) throw std::invalid_argument("missing tensor " + std::string(name));
    if (t->second.rows != m.rows || t->second.cols != m.cols || t->second.size() != m.size()) {
      throw std::invalid_argument("tensor " + std::string(name) + " has the wrong shape");
    }
    m = t->second;
    ++matched;
  });
  if (matched != tensors.size()) {
    throw std::invalid_argument("unexpected tensors for model " + std::string(to_string(kind)));
  }
  return s;
}

void normalize_hyperplanes(ParameterStore& store) {
  Matrix& w = store.relation(RelTensor::Hyperplane);
  for (std::size_t r = 0; r < w.rows; ++r) {
    auto v = w.row(r);
    const double n = ball::norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
    }
  }
}

void givens_rotate(ConstVec angles, ConstVec x, std::span<double> out) {
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double c = std::cos(angles[j]);
    const double s = std::sin(angles[j]);
    const double x0 = x[2 * j];
    const double x1 = x[2 * j + 1];
    out[2 * j] = c * x0 - s * x1;
    out[2 * j + 1] = s * x0 + c * x1;
  }
}

void givens_reflect(ConstVec angles, ConstVec x, std::span<double> out) {
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double c = std::cos(angles[j]);
    const double s = std::sin(angles[j]);
    const double x0 = x[2 * j];
    const double x1 = x[2 * j + 1];
    out[2 * j] = c * x0 + s * x1;
    out[2 * j + 1] = s * x0 - c * x1;
  }
}

Matrix givens_matrix(ConstVec angles, bool reflection) {
  const std::size_t d = 2 * angles.size();
  Matrix g(d, d);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double c = std::cos(angles[j]);
    const double s = std::sin(angles[j]);
    const std::size_t a = 2 * j;
    g(a, a) = c;
    g(a + 1, a) = s;
    if (reflection) {
      g(a, a + 1) = s;
      g(a + 1, a + 1) = -c;
    } else {
      g(a, a + 1) = -s;
      g(a + 1, a + 1) = c;
    }
  }
  return g;
}

double score_transe(ConstVec h, ConstVec r, ConstVec t) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = h[i] + r[i] - t[i];
    s += z * z;
  }
  return -std::sqrt(s);
}

double score_transh(ConstVec h, ConstVec w, ConstVec r, ConstVec t) {
  if (std::abs(ball::norm(w) - 1.0) > 1e-9) {
    throw std::invalid_argument("TransH hyperplane normal must have unit norm");
  }
  const double wh = ball::dot(w, h);
  const double wt = ball::dot(w, t);
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = (h[i] - wh * w[i]) + r[i] - (t[i] - wt * w[i]);
    s += z * z;
  }
  return -std::sqrt(s);
}

double score_distmul(ConstVec h, ConstVec r, ConstVec t) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * r[i] * t[i];
  return s;
}

double score_rotate(ConstVec h, ConstVec phases, ConstVec t) {
  double s = 0.0;
  for (std::size_t j = 0; j < phases.size(); ++j) {
    const double c = std::cos(phases[j]);
    const double sn = std::sin(phases[j]);
    const double z0 = c * h[2 * j] - sn * h[2 * j + 1] - t[2 * j];
    const double z1 = sn * h[2 * j] + c * h[2 * j + 1] - t[2 * j + 1];
    s += z0 * z0 + z1 * z1;
  }
  return -std::sqrt(s);
}

double score_mure(ConstVec h, ConstVec diag, ConstVec r, ConstVec t, double bh, double bt) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = diag[i] * h[i] - (t[i] + r[i]);
    s += z * z;
  }
  return -s + bh + bt;
}

double score_murp(ConstVec h, ConstVec diag, ConstVec r, ConstVec t, double bh, double bt) {
  const std::size_t d = h.size();
  auto& mh = scratch(0, d);
  auto& tr = scratch(1, d);
  ball::mobius_matvec_diag(diag, h, mh);
  ball::mobius_add(t, r, tr);
  const double dist = ball::distance(mh, tr);
  return -dist * dist + bh + bt;
}

double score_rotref(ConstVec h, ConstVec rot, ConstVec ref, ConstVec attn, ConstVec r, ConstVec t,
                    double bh, double bt, Space space) {
  const std::size_t d = h.size();
  const RotRefMix mix = rotref_mix(h, rot, ref, attn, 2);
  const auto& q = *mix.q;
  if (space == Space::Hyperbolic) {
    auto& qb = scratch(5, d);
    auto& p = scratch(6, d);
    ball::expmap0(q, qb);
    ball::mobius_add(qb, r, p);
    const double dist = ball::distance(p, t);
    return -dist * dist + bh + bt;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double z = q[i] + r[i] - t[i];
    s += z * z;
  }
  return -s + bh + bt;
}

double score(const ParameterStore& s, const Triple& tr) {
  check_ids(s, tr);
  const std::size_t d = s.dim;
  const ConstVec h = row(s.entity_emb, tr.head);
  const ConstVec t = row(s.entity_emb, tr.tail);
  const auto rel = [&](RelTensor k) { return row(s.relation(k), tr.relation); };
  const double bh = bias(s, tr.head);
  const double bt = bias(s, tr.tail);

  switch (s.kind) {
    case ModelKind::TransE: return score_transe(h, rel(RelTensor::Translation), t);
    case ModelKind::TransH: {
      auto& w = scratch(7, d);
      unit_normal(rel(RelTensor::Hyperplane), w);
      return score_transh(h, w, rel(RelTensor::Translation), t);
    }
    case ModelKind::DistMul: return score_distmul(h, rel(RelTensor::Diag), t);
    case ModelKind::RotatE: return score_rotate(h, rel(RelTensor::Phase), t);
    case ModelKind::MuRE:
      return score_mure(h, rel(RelTensor::Diag), rel(RelTensor::Translation), t, bh, bt);
    case ModelKind::MuRP: {
      auto& hb = scratch(8, d);
      auto& tb = scratch(9, d);
      auto& rb = scratch(10, d);
      ball::expmap0(h, hb);
      ball::expmap0(t, tb);
      ball::expmap0(rel(RelTensor::Translation), rb);
      return score_murp(hb, rel(RelTensor::Diag), rb, tb, bh, bt);
    }
    case ModelKind::RotRefE:
      return score_rotref(h, rel(RelTensor::GivensRot), rel(RelTensor::GivensRef),
                          rel(RelTensor::Attention), rel(RelTensor::Translation), t, bh, bt,
                          Space::Euclidean);
    case ModelKind::RotRefH: {
      auto& tb = scratch(9, d);
      auto& rb = scratch(10, d);
      ball::expmap0(t, tb);
      ball::expmap0(rel(RelTensor::Translation), rb);
      return score_rotref(h, rel(RelTensor::GivensRot), rel(RelTensor::GivensRef),
                          rel(RelTensor::Attention), rb, tb, bh, bt, Space::Hyperbolic);
    }
  }
  return 0.0;
}

void TripleGrad::reset(const ParameterStore& store) {
  head.assign(store.dim, 0.0);
  tail.assign(store.dim, 0.0);
  head_bias = 0.0;
  tail_bias = 0.0;
  for (std::size_t i = 0; i < kRelTensorCount; ++i) rel[i].assign(store.rel[i].cols, 0.0);
}

double score_with_gradient(const ParameterStore& s, const Triple& tr, TripleGrad& g) {
  check_ids(s, tr);
  g.reset(s);
  const std::size_t d = s.dim;
  const ConstVec h = row(s.entity_emb, tr.head);
  const ConstVec t = row(s.entity_emb, tr.tail);
  const auto rel = [&](RelTensor k) { return row(s.relation(k), tr.relation); };
  const auto grel = [&](RelTensor k) -> std::span<double> {
    return g.rel[static_cast<std::size_t>(k)];
  };
  const double bh = bias(s, tr.head);
  const double bt = bias(s, tr.tail);

  switch (s.kind) {
    case ModelKind::TransE: {
      const ConstVec r = rel(RelTensor::Translation);
      auto& z = scratch(0, d);
      for (std::size_t i = 0; i < d; ++i) z[i] = h[i] + r[i] - t[i];
      const double n = ball::norm(z);
      if (n > 0.0) {
        auto gr = grel(RelTensor::Translation);
        for (std::size_t i = 0; i < d; ++i) {
          const double gz = -z[i] / n;
          g.head[i] += gz;
          gr[i] += gz;
          g.tail[i] -= gz;
        }
      }
      return -n;
    }
    case ModelKind::TransH: {
      const ConstVec wraw = rel(RelTensor::Hyperplane);
      const ConstVec r = rel(RelTensor::Translation);
      const double nw = ball::norm(wraw);
      auto& w = scratch(0, d);
      auto& e = scratch(1, d);
      auto& z = scratch(2, d);
      unit_normal(wraw, w);
      for (std::size_t i = 0; i < d; ++i) e[i] = h[i] - t[i];
      const double se = ball::dot(w, e);
      for (std::size_t i = 0; i < d; ++i) z[i] = e[i] - se * w[i] + r[i];
      const double n = ball::norm(z);
      if (n > 0.0) {
        auto& gz = scratch(3, d);
        auto& gw = scratch(4, d);
        for (std::size_t i = 0; i < d; ++i) gz[i] = -z[i] / n;
        const double wgz = ball::dot(w, gz);
        auto gr = grel(RelTensor::Translation);
        for (std::size_t i = 0; i < d; ++i) {
          const double ge = gz[i] - w[i] * wgz;
          g.head[i] += ge;
          g.tail[i] -= ge;
          gr[i] += gz[i];
          gw[i] = -(se * gz[i] + wgz * e[i]);
        }
        // Back through w = wraw / |wraw|.
        const double wgw = ball::dot(w, gw);
        auto gh = grel(RelTensor::Hyperplane);
        for (std::size_t i = 0; i < d; ++i) gh[i] += (gw[i] - w[i] * wgw) / nw;
      }
      return -n;
    }
    case ModelKind::DistMul: {
      const ConstVec r = rel(RelTensor::Diag);
      auto gr = grel(RelTensor::Diag);
      double value = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        value += h[i] * r[i] * t[i];
        g.head[i] += r[i] * t[i];
        gr[i] += h[i] * t[i];
        g.tail[i] += h[i] * r[i];
      }
      return value;
    }
    case ModelKind::RotatE: {
      const ConstVec ph = rel(RelTensor::Phase);
      auto& z = scratch(0, d);
      for (std::size_t j = 0; j < ph.size(); ++j) {
        const double c = std::cos(ph[j]);
        const double sn = std::sin(ph[j]);
        z[2 * j] = c * h[2 * j] - sn * h[2 * j + 1] - t[2 * j];
        z[2 * j + 1] = sn * h[2 * j] + c * h[2 * j + 1] - t[2 * j + 1];
      }
      const double n = ball::norm(z);
      if (n > 0.0) {
        auto gp = grel(RelTensor::Phase);
        for (std::size_t j = 0; j < ph.size(); ++j) {
          const double c = std::cos(ph[j]);
          const double sn = std::sin(ph[j]);
          const double g0 = -z[2 * j] / n;
          const double g1 = -z[2 * j + 1] / n;
          const double h0 = h[2 * j];
          const double h1 = h[2 * j + 1];
          g.head[2 * j] += c * g0 + sn * g1;
          g.head[2 * j + 1] += -sn * g0 + c * g1;
          g.tail[2 * j] -= g0;
          g.tail[2 * j + 1] -= g1;
          gp[j] += (-sn * h0 - c * h1) * g0 + (c * h0 - sn * h1) * g1;
        }
      }
      return -n;
    }
    case ModelKind::MuRE: {
      const ConstVec diag = rel(RelTensor::Diag);
      const ConstVec r = rel(RelTensor::Translation);
      auto gd = grel(RelTensor::Diag);
      auto gr = grel(RelTensor::Translation);
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double z = diag[i] * h[i] - (t[i] + r[i]);
        sq += z * z;
        const double gz = -2.0 * z;
        gd[i] += gz * h[i];
        g.head[i] += gz * diag[i];
        g.tail[i] -= gz;
        gr[i] -= gz;
      }
      g.head_bias = 1.0;
      g.tail_bias = 1.0;
      return -sq + bh + bt;
    }
    case ModelKind::MuRP: {
      const ConstVec diag = rel(RelTensor::Diag);
      const ConstVec r = rel(RelTensor::Translation);
      auto& hb = scratch(0, d);
      auto& tb = scratch(1, d);
      auto& rb = scratch(2, d);
      auto& p = scratch(3, d);
      auto& q = scratch(4, d);
      auto& gp = scratch(5, d);
      auto& gq = scratch(6, d);
      auto& ghb = scratch(7, d);
      auto& gtb = scratch(8, d);
      auto& grb = scratch(9, d);
      ball::expmap0(h, hb);
      ball::expmap0(t, tb);
      ball::expmap0(r, rb);
      ball::mobius_matvec_diag(diag, hb, p);
      ball::mobius_add(tb, rb, q);
      const double sq = ball::sq_distance_backward(p, q, -1.0, gp, gq);
      ball::mobius_matvec_diag_backward(diag, hb, gp, grel(RelTensor::Diag), ghb);
      ball::mobius_add_backward(tb, rb, gq, gtb, grb);
      ball::expmap0_backward(h, ghb, g.head);
      ball::expmap0_backward(t, gtb, g.tail);
      ball::expmap0_backward(r, grb, grel(RelTensor::Translation));
      g.head_bias = 1.0;
      g.tail_bias = 1.0;
      return -sq + bh + bt;
    }
    case ModelKind::RotRefE:
    case ModelKind::RotRefH: {
      const ConstVec rot = rel(RelTensor::GivensRot);
      const ConstVec ref = rel(RelTensor::GivensRef);
      const ConstVec attn = rel(RelTensor::Attention);
      const ConstVec r = rel(RelTensor::Translation);
      const RotRefMix mix = rotref_mix(h, rot, ref, attn, 0);
      const auto& q_rot = *mix.q_rot;
      const auto& q_ref = *mix.q_ref;
      const auto& q = *mix.q;
      auto& gq = scratch(3, d);
      double value;
      if (s.kind == ModelKind::RotRefE) {
        auto gr = grel(RelTensor::Translation);
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double z = q[i] + r[i] - t[i];
          sq += z * z;
          gq[i] = -2.0 * z;
          gr[i] += gq[i];
          g.tail[i] -= gq[i];
        }
        value = -sq + bh + bt;
      } else {
        auto& qb = scratch(4, d);
        auto& tb = scratch(5, d);
        auto& rb = scratch(6, d);
        auto& p = scratch(7, d);
        auto& gp = scratch(8, d);
        auto& gtb = scratch(9, d);
        auto& gqb = scratch(10, d);
        auto& grb = scratch(11, d);
        ball::expmap0(q, qb);
        ball::expmap0(t, tb);
        ball::expmap0(r, rb);
        ball::mobius_add(qb, rb, p);
        const double sq = ball::sq_distance_backward(p, tb, -1.0, gp, gtb);
        ball::mobius_add_backward(qb, rb, gp, gqb, grb);
        ball::expmap0_backward(q, gqb, gq);
        ball::expmap0_backward(r, grb, grel(RelTensor::Translation));
        ball::expmap0_backward(t, gtb, g.tail);
        value = -sq + bh + bt;
      }
      // Back through the attention mix.
      const double ga_rot = ball::dot(q_rot, gq);
      const double ga_ref = ball::dot(q_ref, gq);
      const double mean = mix.w_rot * ga_rot + mix.w_ref * ga_ref;
      const double gl_rot = mix.w_rot * (ga_rot - mean);
      const double gl_ref = mix.w_ref * (ga_ref - mean);
      auto ga = grel(RelTensor::Attention);
      axpy(gl_rot, q_rot, ga);
      axpy(gl_ref, q_ref, ga);
      auto g_rot = grel(RelTensor::GivensRot);
      auto g_ref = grel(RelTensor::GivensRef);
      for (std::size_t j = 0; j < rot.size(); ++j) {
        const double h0 = h[2 * j];
        const double h1 = h[2 * j + 1];
        // Rotation block.
        {
          const double c = std::cos(rot[j]);
          const double sn = std::sin(rot[j]);
          const double g0 = mix.w_rot * gq[2 * j] + gl_rot * attn[2 * j];
          const double g1 = mix.w_rot * gq[2 * j + 1] + gl_rot * attn[2 * j + 1];
          g.head[2 * j] += c * g0 + sn * g1;
          g.head[2 * j + 1] += -sn * g0 + c * g1;
          g_rot[j] += (-sn * h0 - c * h1) * g0 + (c * h0 - sn * h1) * g1;
        }
        // Reflection block.
        {
          const double c = std::cos(ref[j]);
          const double sn = std::sin(ref[j]);
          const double g0 = mix.w_ref * gq[2 * j] + gl_ref * attn[2 * j];
          const double g1 = mix.w_ref * gq[2 * j + 1] + gl_ref * attn[2 * j + 1];
          g.head[2 * j] += c * g0 + sn * g1;
          g.head[2 * j + 1] += sn * g0 - c * g1;
          g_ref[j] += (-sn * h0 + c * h1) * g0 + (c * h0 + sn * h1) * g1;
        }
      }
      g.head_bias = 1.0;
      g.tail_bias = 1.0;
      return value;
    }
  }
  return 0.0;
}

double finite_difference_check(const ParameterStore& store, const Triple& triple, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  TripleGrad g;
  score_with_gradient(store, triple, g);
  ParameterStore probe = store;
  double worst = 0.0;

  const auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + step;
    const double up = score(probe, triple);
    param = saved - step;
    const double down = score(probe, triple);
    param = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1.0});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };

  const auto h = static_cast<std::size_t>(triple.head);
  const auto t = static_cast<std::size_t>(triple.tail);
  const auto r = static_cast<std::size_t>(triple.relation);
  const bool self_loop = h == t;
  for (std::size_t i = 0; i < store.dim; ++i) {
    check(probe.entity_emb(h, i), g.head[i] + (self_loop ? g.tail[i] : 0.0));
    if (!self_loop) check(probe.entity_emb(t, i), g.tail[i]);
  }
  if (!probe.entity_bias.empty()) {
    check(probe.entity_bias(h, 0), g.head_bias + (self_loop ? g.tail_bias : 0.0));
    if (!self_loop) check(probe.entity_bias(t, 0), g.tail_bias);
  }
  for (std::size_t k = 0; k < kRelTensorCount; ++k) {
    Matrix& m = probe.rel[k];
    for (std::size_t j = 0; j < m.cols; ++j) check(m(r, j), g.rel[k][j]);
  }
  return worst;
}

}  // namespace hyprec
