#include "hyprec/knowledge_graph.hpp"

#include <stdexcept>

#include "hyprec/random.hpp"

namespace hyprec {

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
  const auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.head));
  const auto r = static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.relation));
  const auto tl = static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.tail));
  return static_cast<std::size_t>(mix64((h << 32 | tl) ^ mix64(r)));
}

std::int32_t Vocab::intern(std::string_view name) {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::int32_t> Vocab::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

bool KnowledgeGraph::add(const Triple& t) {
  if (t.head < 0 || static_cast<std::size_t>(t.head) >= entities.size() || t.tail < 0 ||
      static_cast<std::size_t>(t.tail) >= entities.size() || t.relation < 0 ||
      static_cast<std::size_t>(t.relation) >= relations.size()) {
    throw std::out_of_range("triple references an id outside the vocabulary");
  }
  if (!index_.insert(t).second) return false;
  triples_.push_back(t);
  return true;
}

bool KnowledgeGraph::add(std::string_view head, std::string_view relation, std::string_view tail) {
  const EntityId h = entities.intern(head);
  const RelationId r = relations.intern(relation);
  const EntityId t = entities.intern(tail);
  return add(Triple{h, r, t});
}

KnowledgeGraph KnowledgeGraph::empty_copy() const {
  KnowledgeGraph g;
  g.entities = entities;
  g.relations = relations;
  return g;
}

std::vector<std::size_t> KnowledgeGraph::relation_counts() const {
  std::vector<std::size_t> counts(relations.size(), 0);
  for (const auto& t : triples_) ++counts[static_cast<std::size_t>(t.relation)];
  return counts;
}

}  // namespace hyprec
