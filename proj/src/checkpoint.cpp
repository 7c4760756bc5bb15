#include "hyprec/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "hyprec/errors.hpp"
#include "hyprec/io.hpp"

namespace hyprec {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(std::string_view bytes, std::size_t at) {
  T v;
  std::memcpy(&v, bytes.data() + at, sizeof(T));
  return v;
}

struct Entry {
  std::string name;
  const Matrix* m;
};

std::vector<Entry> entries(const Checkpoint& c) {
  std::vector<Entry> out;
  c.state.params.for_each_tensor([&](std::string_view n, const Matrix& m) { out.push_back({std::string(n), &m}); });
  c.state.optimizer.m.for_each_tensor(
      [&](std::string_view n, const Matrix& m) { out.push_back({"adam.m/" + std::string(n), &m}); });
  c.state.optimizer.v.for_each_tensor(
      [&](std::string_view n, const Matrix& m) { out.push_back({"adam.v/" + std::string(n), &m}); });
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const auto& p = c.state.params;
  const auto& opt = c.state.optimizer;
  nlohmann::json h;
  h["format"] = "hyprec-checkpoint";
  h["version"] = kCheckpointVersion;
  h["model"] = std::string(to_string(p.kind));
  h["space"] = std::string(to_string(space_of(p.kind)));
  h["dim"] = p.dim;
  h["config"] = c.config;
  h["config_hash"] = c.config_hash;
  h["seed"] = c.seed;
  h["entities"] = c.entities;
  h["relations"] = c.relations;
  h["optimizer"] = {{"step", opt.step}, {"beta1", opt.beta1}, {"beta2", opt.beta2}, {"eps", opt.eps}};
  h["training"] = {{"epoch", c.state.epoch},
                   {"best_dev_hr10", c.state.best_dev_hr10},
                   {"evals_since_best", c.state.evals_since_best},
                   {"best_epoch", c.best_epoch}};
  nlohmann::json list = nlohmann::json::array();
  std::uint64_t offset = 0;
  const auto es = entries(c);
  for (const auto& e : es) {
    list.push_back({{"name", e.name}, {"rows", e.m->rows}, {"cols", e.m->cols}, {"offset", offset}});
    offset += e.m->data.size() * sizeof(double);
  }
  h["tensors"] = list;
  const std::string header = h.dump();

  std::string out(kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header.size());
  out += header;
  out.reserve(out.size() + offset);
  for (const auto& e : es) {
    out.append(reinterpret_cast<const char*>(e.m->data.data()), e.m->data.size() * sizeof(double));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& source) {
  const auto fail = [&](const std::string& msg) { return InputError(source + ": " + msg); };
  const std::size_t prefix = kCheckpointMagic.size() + 4 + 8;
  if (bytes.size() < prefix || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw fail("not a checkpoint file");
  }
  const auto version = get<std::uint32_t>(bytes, kCheckpointMagic.size());
  if (version != kCheckpointVersion) {
    throw fail("unsupported checkpoint version " + std::to_string(version) + " (expected " +
               std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = get<std::uint64_t>(bytes, kCheckpointMagic.size() + 4);
  if (header_len > bytes.size() - prefix) throw fail("truncated header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(prefix, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("corrupt header: ") + e.what());
  }
  const std::string_view payload = bytes.substr(prefix + header_len);

  Checkpoint c;
  try {
    const auto kind = parse_model_kind(h.at("model").get<std::string>());
    if (!kind) throw fail("unknown model in checkpoint");
    const auto dim = h.at("dim").get<std::size_t>();
    c.config = h.at("config");
    c.config_hash = h.at("config_hash").get<std::string>();
    c.seed = h.at("seed").get<std::uint64_t>();
    c.entities = h.at("entities").get<std::vector<std::string>>();
    c.relations = h.at("relations").get<std::vector<std::string>>();
    const auto& opt = h.at("optimizer");
    c.state.optimizer.step = opt.at("step").get<std::uint64_t>();
    c.state.optimizer.beta1 = opt.at("beta1").get<double>();
    c.state.optimizer.beta2 = opt.at("beta2").get<double>();
    c.state.optimizer.eps = opt.at("eps").get<double>();
    const auto& tr = h.at("training");
    c.state.epoch = tr.at("epoch").get<std::size_t>();
    c.state.best_dev_hr10 = tr.at("best_dev_hr10").get<double>();
    c.state.evals_since_best = tr.at("evals_since_best").get<std::size_t>();
    c.best_epoch = tr.at("best_epoch").get<std::size_t>();

    NamedTensors params, m, v;
    std::uint64_t expected = 0;
    for (const auto& t : h.at("tensors")) {
      Matrix mat(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>());
      const auto offset = t.at("offset").get<std::uint64_t>();
      const std::uint64_t len = mat.data.size() * sizeof(double);
      if (offset != expected || offset + len > payload.size()) throw fail("tensor payload out of range");
      std::memcpy(mat.data.data(), payload.data() + offset, len);
      expected += len;
      const auto name = t.at("name").get<std::string>();
      if (name.starts_with("adam.m/")) {
        m.emplace(name.substr(7), std::move(mat));
      } else if (name.starts_with("adam.v/")) {
        v.emplace(name.substr(7), std::move(mat));
      } else {
        params.emplace(name, std::move(mat));
      }
    }
    if (expected != payload.size()) throw fail("trailing bytes after tensor payload");
    c.state.params = from_named_tensors(*kind, dim, params);
    c.state.optimizer.m = from_named_tensors(*kind, dim, m);
    c.state.optimizer.v = from_named_tensors(*kind, dim, v);
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  if (c.entities.size() != c.state.params.n_entities() || c.relations.size() != c.state.params.n_relations()) {
    throw fail("vocabulary size does not match tensor shapes");
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path), path.string());
}

}  // namespace hyprec
