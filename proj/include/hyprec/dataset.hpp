#pragma once

// Leave-last-two split of the buy interactions. Users are heads of buy triples,
// items are their tails; each user's timeline is the file order of those triples.

#include <cstddef>
#include <map>
#include <vector>

#include "hyprec/knowledge_graph.hpp"

namespace hyprec {

struct SplitDataset {
  KnowledgeGraph train;  // shares vocabularies with the source graph
  std::vector<Triple> dev;
  std::vector<Triple> test;
  std::map<EntityId, std::vector<EntityId>> timelines;  // user -> items, chronological
  std::vector<EntityId> items;                          // every buy tail, ascending
  RelationId buy = 0;

  // Number of train buy triples of `user`.
  std::size_t train_interactions(EntityId user) const;
};

// Last interaction of each user with >= 3 interactions goes to test, the
// penultimate one to dev, everything else (including all non-buy triples) to
// train. Throws InputError when g has no buy relation.
SplitDataset split_leave_last_two(const KnowledgeGraph& g);

}  // namespace hyprec
