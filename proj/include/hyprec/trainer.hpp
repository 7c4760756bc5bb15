#pragma once

// Minibatch training with BCE over tail-corrupted negatives and Adam on the
// stored (tangent) coordinates, with dev-set early stopping.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hyprec/dataset.hpp"
#include "hyprec/evaluator.hpp"
#include "hyprec/kg_models.hpp"
#include "hyprec/random.hpp"

namespace hyprec {

inline constexpr std::array<double, 4> kLearningRateGrid{1e-4, 5e-4, 1e-3, 5e-3};
inline constexpr std::array<std::size_t, 3> kBatchSizeGrid{256, 512, 1024};

struct TrainConfig {
  std::size_t dim = 64;
  double lr = 1e-3;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 1000;
  std::size_t neg_samples = 50;
  std::size_t eval_every = 5;
  std::size_t patience = 20;
  double l2 = 0.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

// Tail corruption restricted to the tail's class: items for buy, every entity
// for other relations. True train tails of (head, relation) are never drawn.
class NegativeSampler {
 public:
  NegativeSampler(const KnowledgeGraph& train, RelationId buy, std::span<const EntityId> items);

  // Appends k negatives for `positive` to `out`. Returns false when fewer than k
  // distinct candidates exist, in which case they are drawn with replacement.
  // Throws InputError when no candidate exists at all.
  bool sample(const Triple& positive, std::size_t k, Rng& rng, std::vector<EntityId>& out) const;

 private:
  const KnowledgeGraph* train_;
  RelationId buy_;
  std::vector<EntityId> items_;
  std::vector<char> is_item_;
  std::size_t n_entities_;
  std::vector<std::vector<std::uint32_t>> positives_in_class_;  // [relation][head]
};

double softplus(double x);
double sigmoid(double x);

// Mean over positives of softplus(-s+) + mean_k softplus(s-). negatives holds k
// scores per positive, positive-major. Throws std::invalid_argument on an empty
// positive list or a size mismatch.
double loss_bce_negative_sampling(std::span<const double> positives, std::span<const double> negatives);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  ParameterStore m;
  ParameterStore v;

  static AdamState for_store(const ParameterStore& params);
  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam on every parameter, then TransH hyperplane renormalization.
// With l2 > 0 the gradient gains l2 * theta. Returns false (and changes nothing)
// when a gradient entry is non-finite.
bool adam_step(ParameterStore& params, const ParameterStore& grads, AdamState& state, double lr,
               double l2 = 0.0);

// One positive with its corrupted tails.
struct TrainExample {
  Triple positive;
  std::vector<EntityId> negative_tails;
};

// Dense gradient of the mean batch loss, reduced in example order so the result
// is identical for every thread count. Returns the batch loss.
double batch_gradient(const ParameterStore& store, std::span<const TrainExample> batch,
                      ParameterStore& grads);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<SliceMetrics> dev;
  std::size_t skipped_batches = 0;
  std::size_t short_negative_sets = 0;
  double wall_seconds = 0.0;
};

struct TrainState {
  ParameterStore params;
  AdamState optimizer;
  std::size_t epoch = 0;  // last completed epoch
  double best_dev_hr10 = -1.0;
  std::size_t evals_since_best = 0;

  bool operator==(const TrainState&) const = default;
};

struct TrainResult {
  TrainState best;  // snapshot taken at the best dev evaluation
  TrainState last;
  std::vector<EpochLog> log;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// train_graph holds the train triples the loss sees (normally the train split
// plus inverse relations). Without dev queries the final epoch counts as best.
// Passing `resume` continues from that state; epoch randomness derives from
// (seed, epoch) so a resumed run replays the original trajectory.
// Throws NumericalError when every batch of an epoch had to be skipped.
TrainResult train(const KnowledgeGraph& train_graph, const SplitDataset& split, ModelKind kind,
                  const TrainConfig& config, const EvalCandidates& dev,
                  const std::optional<TrainState>& resume = std::nullopt,
                  const EpochCallback& on_epoch = {});

}  // namespace hyprec
