#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hyprec {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept;
};

// Interned string table: ids are dense and assigned in first-seen order.
class Vocab {
 public:
  std::int32_t intern(std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  bool operator==(const Vocab& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

inline constexpr std::string_view kBuyRelation = "buy";
inline constexpr std::string_view kSemanticRelation = "has_semantic_similarity";

// Multi-relational graph G = (E, R, T) without duplicate triples.
class KnowledgeGraph {
 public:
  Vocab entities;
  Vocab relations;

  // Returns false when the triple was already present.
  bool add(const Triple& t);
  bool add(std::string_view head, std::string_view relation, std::string_view tail);

  bool contains(const Triple& t) const { return index_.contains(t); }
  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }

  // Same vocabularies, no triples.
  KnowledgeGraph empty_copy() const;

  // Triple count per relation id.
  std::vector<std::size_t> relation_counts() const;

 private:
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> index_;
};

}  // namespace hyprec
