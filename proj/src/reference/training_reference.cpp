#include "hyprec/reference.hpp"

namespace hyprec::reference {

std::vector<int> rank_queries(const EvalCandidates& candidates,
                              const std::function<double(EntityId, EntityId)>& scorer) {
  std::vector<int> ranks;
  ranks.reserve(candidates.queries.size());
  for (const auto& q : candidates.queries) {
    std::vector<double> neg;
    for (EntityId i : q.negatives) neg.push_back(scorer(q.user, i));
    ranks.push_back(rank_ground_truth(scorer(q.user, q.item), neg));
  }
  return ranks;
}

double batch_gradient(const ParameterStore& store, std::span<const TrainExample> batch,
                      ParameterStore& grads) {
  grads = zeros_like(store);
  const double b = static_cast<double>(batch.size());
  double loss = 0.0;
  TripleGrad g;
  for (const auto& ex : batch) {
    const double k = static_cast<double>(ex.negative_tails.size());
    for (std::size_t j = 0; j <= ex.negative_tails.size(); ++j) {
      Triple tr = ex.positive;
      if (j > 0) tr.tail = ex.negative_tails[j - 1];
      const double s = score_with_gradient(store, tr, g);
      const double c = j == 0 ? -sigmoid(-s) / b : sigmoid(s) / (k * b);
      loss += (j == 0 ? softplus(-s) : softplus(s) / k) / b;
      auto h = grads.entity_emb.row(static_cast<std::size_t>(tr.head));
      auto t = grads.entity_emb.row(static_cast<std::size_t>(tr.tail));
      for (std::size_t i = 0; i < store.dim; ++i) {
        h[i] += c * g.head[i];
        t[i] += c * g.tail[i];
      }
      if (!grads.entity_bias.empty()) {
        grads.entity_bias(static_cast<std::size_t>(tr.head), 0) += c * g.head_bias;
        grads.entity_bias(static_cast<std::size_t>(tr.tail), 0) += c * g.tail_bias;
      }
      for (std::size_t r = 0; r < kRelTensorCount; ++r) {
        if (grads.rel[r].empty()) continue;
        auto row = grads.rel[r].row(static_cast<std::size_t>(tr.relation));
        for (std::size_t i = 0; i < row.size(); ++i) row[i] += c * g.rel[r][i];
      }
    }
  }
  return loss;
}

}  // namespace hyprec::reference
