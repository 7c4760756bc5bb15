#include "hyprec/dataset.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "hyprec/errors.hpp"

namespace hyprec {

std::size_t SplitDataset::train_interactions(EntityId user) const {
  const auto it = timelines.find(user);
  if (it == timelines.end()) return 0;
  const std::size_t n = it->second.size();
  return n >= 3 ? n - 2 : n;
}

SplitDataset split_leave_last_two(const KnowledgeGraph& g) {
  const auto buy = g.relations.find(kBuyRelation);
  if (!buy) throw InputError("graph has no '" + std::string(kBuyRelation) + "' relation");

  SplitDataset s;
  s.train = g.empty_copy();
  s.buy = *buy;

  std::map<EntityId, std::vector<std::size_t>> positions;
  const auto& triples = g.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (triples[i].relation == s.buy) positions[triples[i].head].push_back(i);
  }

  std::vector<char> held(triples.size(), 0);
  for (const auto& [user, pos] : positions) {
    auto& line = s.timelines[user];
    for (std::size_t i : pos) line.push_back(triples[i].tail);
    if (pos.size() >= 3) {
      held[pos[pos.size() - 2]] = 1;
      held[pos.back()] = 2;
      s.dev.push_back(triples[pos[pos.size() - 2]]);
      s.test.push_back(triples[pos.back()]);
    }
  }
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (!held[i]) s.train.add(triples[i]);
  }

  std::unordered_set<EntityId> items;
  for (const auto& [user, line] : s.timelines) items.insert(line.begin(), line.end());
  s.items.assign(items.begin(), items.end());
  std::sort(s.items.begin(), s.items.end());
  return s;
}

}  // namespace hyprec
