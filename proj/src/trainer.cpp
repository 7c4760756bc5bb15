#include "hyprec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hyprec/errors.hpp"

namespace hyprec {

void TrainConfig::validate() const {
  const auto fail = [](const char* field) {
    throw std::invalid_argument(std::string("invalid training config: ") + field + " must be positive");
  };
  if (dim == 0) fail("dim");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("lr");
  if (batch_size == 0) fail("batch_size");
  if (max_epochs == 0) fail("max_epochs");
  if (neg_samples == 0) fail("neg_samples");
  if (eval_every == 0) fail("eval_every");
  if (patience == 0) fail("patience");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw std::invalid_argument("invalid training config: l2 must be non-negative");
  }
}

NegativeSampler::NegativeSampler(const KnowledgeGraph& train, RelationId buy,
                                 std::span<const EntityId> items)
    : train_(&train),
      buy_(buy),
      items_(items.begin(), items.end()),
      n_entities_(train.entities.size()) {
  is_item_.assign(n_entities_, 0);
  for (EntityId i : items_) is_item_[static_cast<std::size_t>(i)] = 1;
  positives_in_class_.assign(train.relations.size(), {});
  for (const auto& t : train.triples()) {
    auto& per_head = positives_in_class_[static_cast<std::size_t>(t.relation)];
    if (per_head.empty()) per_head.assign(n_entities_, 0);
    if (t.relation != buy_ || is_item_[static_cast<std::size_t>(t.tail)]) {
      ++per_head[static_cast<std::size_t>(t.head)];
    }
  }
}

bool NegativeSampler::sample(const Triple& positive, std::size_t k, Rng& rng,
                             std::vector<EntityId>& out) const {
  const bool items_only = positive.relation == buy_;
  const std::size_t universe = items_only ? items_.size() : n_entities_;
  const auto& per_head = positives_in_class_.at(static_cast<std::size_t>(positive.relation));
  const std::size_t taken = per_head.empty() ? 0 : per_head[static_cast<std::size_t>(positive.head)];
  const std::size_t available = universe - std::min(universe, taken);
  if (available == 0) throw InputError("no negative candidates for a training triple");

  const auto draw = [&] {
    const auto idx = uniform_index(rng, universe);
    return items_only ? items_[idx] : static_cast<EntityId>(idx);
  };
  const auto is_positive = [&](EntityId c) {
    return train_->contains({positive.head, positive.relation, c});
  };

  const std::size_t start = out.size();
  if (available >= 2 * k) {
    while (out.size() - start < k) {
      const EntityId c = draw();
      if (is_positive(c) || std::find(out.begin() + static_cast<std::ptrdiff_t>(start), out.end(), c) != out.end()) {
        continue;
      }
      out.push_back(c);
    }
    return true;
  }
  std::vector<EntityId> pool;
  pool.reserve(available);
  for (std::size_t i = 0; i < universe; ++i) {
    const EntityId c = items_only ? items_[i] : static_cast<EntityId>(i);
    if (!is_positive(c)) pool.push_back(c);
  }
  if (pool.size() >= k) {
    for (std::size_t j = 0; j < k; ++j) {
      std::swap(pool[j], pool[j + uniform_index(rng, pool.size() - j)]);
      out.push_back(pool[j]);
    }
    return true;
  }
  for (std::size_t j = 0; j < k; ++j) out.push_back(pool[uniform_index(rng, pool.size())]);
  return false;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double loss_bce_negative_sampling(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty()) throw std::invalid_argument("loss: no positive scores");
  if (negatives.size() % positives.size() != 0 || negatives.empty()) {
    throw std::invalid_argument("loss: negatives must hold k > 0 scores per positive");
  }
  const std::size_t k = negatives.size() / positives.size();
  double total = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    double neg = 0.0;
    for (std::size_t j = 0; j < k; ++j) neg += softplus(negatives[i * k + j]);
    total += softplus(-positives[i]) + neg / static_cast<double>(k);
  }
  return total / static_cast<double>(positives.size());
}

AdamState AdamState::for_store(const ParameterStore& params) {
  AdamState s;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  return s;
}

namespace {

std::vector<Matrix*> tensors(ParameterStore& s) {
  std::vector<Matrix*> out;
  s.for_each_tensor([&](std::string_view, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> tensors(const ParameterStore& s) {
  std::vector<const Matrix*> out;
  s.for_each_tensor([&](std::string_view, const Matrix& m) { out.push_back(&m); });
  return out;
}

void zero(ParameterStore& s) {
  s.for_each_tensor([](std::string_view, Matrix& m) { std::fill(m.data.begin(), m.data.end(), 0.0); });
}

}  // namespace

bool adam_step(ParameterStore& params, const ParameterStore& grads, AdamState& state, double lr,
               double l2) {
  const auto p = tensors(params);
  const auto g = tensors(grads);
  const auto m = tensors(state.m);
  const auto v = tensors(state.v);
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw std::invalid_argument("adam_step: layout mismatch");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (g[i]->size() != p[i]->size() || m[i]->size() != p[i]->size() || v[i]->size() != p[i]->size()) {
      throw std::invalid_argument("adam_step: shape mismatch");
    }
    for (double x : g[i]->data) {
      if (!std::isfinite(x)) return false;
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& theta = p[i]->data;
    const auto& grad = g[i]->data;
    auto& mi = m[i]->data;
    auto& vi = v[i]->data;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double gj = grad[j] + l2 * theta[j];
      mi[j] = state.beta1 * mi[j] + (1.0 - state.beta1) * gj;
      vi[j] = state.beta2 * vi[j] + (1.0 - state.beta2) * gj * gj;
      theta[j] -= lr * (mi[j] / bc1) / (std::sqrt(vi[j] / bc2) + state.eps);
    }
  }
  if (params.kind == ModelKind::TransH) normalize_hyperplanes(params);
  return true;
}

double batch_gradient(const ParameterStore& store, std::span<const TrainExample> batch,
                      ParameterStore& grads) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  const std::size_t d = store.dim;
  std::array<std::size_t, kRelTensorCount> rel_off{};
  std::size_t rel_width = 0;
  for (std::size_t t = 0; t < kRelTensorCount; ++t) {
    rel_off[t] = rel_width;
    rel_width += store.rel[t].cols;
  }
  // Per example: head row, head bias, relation rows, then (row, bias) per tail.
  std::vector<std::size_t> offset(batch.size() + 1, 0);
  for (std::size_t e = 0; e < batch.size(); ++e) {
    offset[e + 1] = offset[e] + d + 1 + rel_width + (batch[e].negative_tails.size() + 1) * (d + 1);
  }
  std::vector<double> buf(offset.back(), 0.0);
  std::vector<double> losses(batch.size(), 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  const auto nb = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel
  {
    TripleGrad g;
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t ei = 0; ei < nb; ++ei) {
      const auto e = static_cast<std::size_t>(ei);
      const TrainExample& ex = batch[e];
      const std::size_t k = ex.negative_tails.size();
      double* base = buf.data() + offset[e];
      double* head = base;
      double* rel = base + d + 1;
      double* tails = rel + rel_width;
      double loss = 0.0;
      for (std::size_t j = 0; j <= k; ++j) {
        Triple tr = ex.positive;
        if (j > 0) tr.tail = ex.negative_tails[j - 1];
        const double s = score_with_gradient(store, tr, g);
        double c;
        if (j == 0) {
          loss += softplus(-s);
          c = -sigmoid(-s) * inv_b;
        } else {
          loss += softplus(s) / static_cast<double>(k);
          c = sigmoid(s) * inv_b / static_cast<double>(k);
        }
        for (std::size_t i = 0; i < d; ++i) head[i] += c * g.head[i];
        head[d] += c * g.head_bias;
        for (std::size_t t = 0; t < kRelTensorCount; ++t) {
          for (std::size_t i = 0; i < g.rel[t].size(); ++i) rel[rel_off[t] + i] += c * g.rel[t][i];
        }
        double* tail = tails + j * (d + 1);
        for (std::size_t i = 0; i < d; ++i) tail[i] = c * g.tail[i];
        tail[d] = c * g.tail_bias;
      }
      losses[e] = loss;
    }
  }

  if (grads.kind != store.kind || grads.dim != store.dim || grads.n_entities() != store.n_entities() ||
      grads.n_relations() != store.n_relations()) {
    grads = zeros_like(store);
  } else {
    zero(grads);
  }
  const bool bias = !grads.entity_bias.empty();
  double total = 0.0;
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const TrainExample& ex = batch[e];
    const double* base = buf.data() + offset[e];
    const auto add_entity = [&](EntityId id, const double* src) {
      auto dst = grads.entity_emb.row(static_cast<std::size_t>(id));
      for (std::size_t i = 0; i < d; ++i) dst[i] += src[i];
      if (bias) grads.entity_bias(static_cast<std::size_t>(id), 0) += src[d];
    };
    add_entity(ex.positive.head, base);
    const double* rel = base + d + 1;
    for (std::size_t t = 0; t < kRelTensorCount; ++t) {
      if (grads.rel[t].empty()) continue;
      auto dst = grads.rel[t].row(static_cast<std::size_t>(ex.positive.relation));
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += rel[rel_off[t] + i];
    }
    const double* tails = rel + rel_width;
    add_entity(ex.positive.tail, tails);
    for (std::size_t j = 0; j < ex.negative_tails.size(); ++j) {
      add_entity(ex.negative_tails[j], tails + (j + 1) * (d + 1));
    }
    total += losses[e];
  }
  return total * inv_b;
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

TrainResult train(const KnowledgeGraph& train_graph, const SplitDataset& split, ModelKind kind,
                  const TrainConfig& config, const EvalCandidates& dev,
                  const std::optional<TrainState>& resume, const EpochCallback& on_epoch) {
  config.validate();
  const std::size_t n_ent = train_graph.entities.size();
  const std::size_t n_rel = train_graph.relations.size();
  const auto& triples = train_graph.triples();
  if (triples.empty()) throw InputError("no training triples");

  TrainState state;
  if (resume) {
    state = *resume;
    if (state.params.kind != kind || state.params.dim != config.dim || state.params.n_entities() != n_ent ||
        state.params.n_relations() != n_rel) {
      throw std::invalid_argument("resume state does not match model or vocabulary");
    }
  } else {
    state.params = init_params(kind, n_ent, n_rel, config.dim, config.seed);
    state.optimizer = AdamState::for_store(state.params);
  }

  const NegativeSampler sampler(train_graph, split.buy, split.items);
  ParameterStore grads = zeros_like(state.params);
  TrainResult result;
  result.best = state;
  bool evaluated = false;

  std::vector<std::size_t> order(triples.size());
  std::vector<TrainExample> batch;
  for (std::size_t epoch = state.epoch + 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;
    std::iota(order.begin(), order.end(), 0);
    Rng order_rng(derive_seed(config.seed, epoch, 1));
    shuffle(order, order_rng);
    Rng neg_rng(derive_seed(config.seed, epoch, 2));

    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        TrainExample& ex = batch[i - start];
        ex.positive = triples[order[i]];
        ex.negative_tails.clear();
        if (!sampler.sample(ex.positive, config.neg_samples, neg_rng, ex.negative_tails)) {
          ++log.short_negative_sets;
        }
      }
      ++batches;
      const double loss = batch_gradient(state.params, batch, grads);
      if (!std::isfinite(loss) || !adam_step(state.params, grads, state.optimizer, config.lr, config.l2)) {
        ++log.skipped_batches;
        continue;
      }
      loss_sum += loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    if (log.skipped_batches == batches) {
      throw NumericalError("every batch of epoch " + std::to_string(epoch) + " was non-finite");
    }
    log.loss = loss_sum / static_cast<double>(seen);
    state.epoch = epoch;

    bool stop = false;
    if (!dev.queries.empty() && (epoch % config.eval_every == 0 || epoch == config.max_epochs)) {
      const SliceMetrics m = metrics_at_10(rank_with_model(state.params, split.buy, dev));
      log.dev = m;
      evaluated = true;
      if (m.hr10 > state.best_dev_hr10) {
        state.best_dev_hr10 = m.hr10;
        state.evals_since_best = 0;
        result.best = state;
      } else if (++state.evals_since_best >= config.patience) {
        stop = true;
      }
    }
    log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (stop) {
      result.early_stopped = true;
      break;
    }
  }
  result.last = state;
  if (!evaluated && !(resume && resume->best_dev_hr10 >= 0.0)) result.best = state;
  return result;
}

}  // namespace hyprec
