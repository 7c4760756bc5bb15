#pragma once

// Run configuration shared by the CLI commands, loaded from JSON and overridden
// by flags of the same name.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyprec/kg_models.hpp"
#include "hyprec/semantic.hpp"
#include "hyprec/trainer.hpp"

namespace hyprec {

struct RunConfig {
  std::string model = "MuRP";
  std::optional<std::string> space;  // checked against the model when given
  std::size_t dim = 64;
  double lr = 1e-3;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 1000;
  std::size_t neg_samples = 50;
  std::size_t eval_every = 5;
  std::size_t patience = 20;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  std::uint64_t eval_seed = 0;
  std::vector<std::string> relations;  // empty keeps every relation
  std::string triples;
  std::string embeddings;
  std::string out_dir = ".";
  int threads = 0;
  double threshold = 0.5;
  std::size_t budget = 10;
  std::string mode = "per-item";
  bool grid = false;

  // Throws InputError naming the first invalid field.
  void validate() const;
  ModelKind model_kind() const;
  TopKMode topk_mode() const;
  TrainConfig train_config(std::uint64_t run_seed) const;
};

// Unknown keys and wrongly typed values raise InputError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

// FNV-1a 64 of the canonical JSON without out_dir and threads, as 16 hex digits.
std::string config_hash(const RunConfig& c);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace hyprec
