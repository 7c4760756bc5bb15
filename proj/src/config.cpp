#include "hyprec/config.hpp"

#include <cstdio>
#include <set>

#include "hyprec/errors.hpp"
#include "hyprec/io.hpp"

namespace hyprec {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model",   "space",     "dim",      "lr",     "batch_size", "max_epochs", "neg_samples", "eval_every",
      "patience", "l2",       "seed",     "seeds",  "eval_seed",  "relations",  "triples",     "embeddings",
      "out_dir", "threads",   "threshold", "budget", "mode",      "grid"};
  return keys;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  const auto kind = parse_model_kind(model);
  if (!kind) {
    std::string valid;
    for (ModelKind k : all_model_kinds()) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
    throw InputError("unknown model '" + model + "'; valid kinds: " + valid);
  }
  if (space && *space != to_string(space_of(*kind))) {
    throw InputError("model " + model + " lives in " + std::string(to_string(space_of(*kind))) +
                     " space, not '" + *space + "'");
  }
  if (requires_even_dim(*kind) && dim % 2 != 0) throw InputError("model " + model + " needs an even dim");
  if (dim < 2) throw InputError("dim must be at least 2");
  if (seeds == 0) throw InputError("seeds must be positive");
  if (threads < 0) throw InputError("threads must be non-negative");
  if (!parse_topk_mode(mode)) throw InputError("mode must be 'global' or 'per-item'");
  if (!(threshold >= -1.0 && threshold <= 1.01)) throw InputError("threshold must lie in [-1, 1.01]");
  try {
    train_config(seed).validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ModelKind RunConfig::model_kind() const {
  const auto k = parse_model_kind(model);
  if (!k) throw InputError("unknown model '" + model + "'");
  return *k;
}

TopKMode RunConfig::topk_mode() const {
  const auto m = parse_topk_mode(mode);
  if (!m) throw InputError("mode must be 'global' or 'per-item'");
  return *m;
}

TrainConfig RunConfig::train_config(std::uint64_t run_seed) const {
  TrainConfig t;
  t.dim = dim;
  t.lr = lr;
  t.batch_size = batch_size;
  t.max_epochs = max_epochs;
  t.neg_samples = neg_samples;
  t.eval_every = eval_every;
  t.patience = patience;
  t.l2 = l2;
  t.seed = run_seed;
  return t;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) throw InputError("unknown config key '" + key + "'");
  }
  RunConfig c;
  read(j, "model", c.model);
  if (j.contains("space")) {
    std::string s;
    read(j, "space", s);
    c.space = s;
  }
  read(j, "dim", c.dim);
  read(j, "lr", c.lr);
  read(j, "batch_size", c.batch_size);
  read(j, "max_epochs", c.max_epochs);
  read(j, "neg_samples", c.neg_samples);
  read(j, "eval_every", c.eval_every);
  read(j, "patience", c.patience);
  read(j, "l2", c.l2);
  read(j, "seed", c.seed);
  read(j, "seeds", c.seeds);
  read(j, "eval_seed", c.eval_seed);
  read(j, "relations", c.relations);
  read(j, "triples", c.triples);
  read(j, "embeddings", c.embeddings);
  read(j, "out_dir", c.out_dir);
  read(j, "threads", c.threads);
  read(j, "threshold", c.threshold);
  read(j, "budget", c.budget);
  read(j, "mode", c.mode);
  read(j, "grid", c.grid);
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = c.model;
  if (c.space) j["space"] = *c.space;
  j["dim"] = c.dim;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["neg_samples"] = c.neg_samples;
  j["eval_every"] = c.eval_every;
  j["patience"] = c.patience;
  j["l2"] = c.l2;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["eval_seed"] = c.eval_seed;
  j["relations"] = c.relations;
  j["triples"] = c.triples;
  j["embeddings"] = c.embeddings;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["threshold"] = c.threshold;
  j["budget"] = c.budget;
  j["mode"] = c.mode;
  j["grid"] = c.grid;
  return j;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) {
  nlohmann::json j = config_to_json(c);
  j.erase("out_dir");
  j.erase("threads");
  return fnv1a_hex(j.dump());
}

}  // namespace hyprec
