#pragma once

// Binary checkpoint: "HYPRCKPT", u32 version, u64 header length (little endian),
// a JSON header, then float64 little-endian row-major tensor payloads.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hyprec/kg_models.hpp"
#include "hyprec/trainer.hpp"

namespace hyprec {

inline constexpr std::string_view kCheckpointMagic = "HYPRCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json config;
  std::string config_hash;
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::uint64_t seed = 0;
  TrainState state;
  std::size_t best_epoch = 0;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
// Throws InputError on a bad magic, unsupported version or inconsistent layout.
Checkpoint deserialize_checkpoint(std::string_view bytes, const std::string& source = "<checkpoint>");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hyprec
