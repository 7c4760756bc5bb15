#pragma once

// Synthetic two-block user-item graph: users of block b only buy items of block
// b, with a geometric popularity profile inside the block. Optional cold users
// own a single train purchase of a "niche" item that no warm user buys.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hyprec/knowledge_graph.hpp"
#include "hyprec/semantic.hpp"

namespace hyprec::testing {

struct PlantedOptions {
  std::size_t blocks = 2;
  std::size_t users_per_block = 100;
  std::size_t items_per_block = 50;
  std::size_t interactions = 22;  // per warm user, train + dev + test
  double skew = 0.1;              // item j of a block has weight exp(-skew * j)
  std::size_t cold_users_per_block = 0;
  std::size_t niche_items_per_block = 0;
  std::size_t text_dim = 16;
  double text_noise = 0.35;
  std::uint64_t seed = 7;
};

struct PlantedGraph {
  KnowledgeGraph graph;
  ItemEmbeddingTable text;  // one vector per item, block centroid plus noise
  std::vector<std::string> cold_users;
  std::vector<std::string> niche_items;
};

std::string user_name(std::size_t u);
std::string item_name(std::size_t i);

PlantedGraph make_planted_graph(const PlantedOptions& options);

}  // namespace hyprec::testing
