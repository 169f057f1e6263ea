#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaifman/common.hpp"

namespace gaifman {

using EntityId = std::uint32_t;
using PredicateId = std::uint32_t;

inline const std::string kUntyped = "untyped";

// Slot/entity compatibility: `untyped` acts as a wildcard on either side.
inline bool type_compatible(const std::string& entity_type, const std::string& slot_type) {
  return entity_type == kUntyped || slot_type == kUntyped || entity_type == slot_type;
}

struct PredicateSchema {
  std::string name;
  std::vector<std::string> arg_types;
  bool declared = false;  // true when given by @schema rather than inferred
  int arity() const { return static_cast<int>(arg_types.size()); }
};

struct GroundAtom {
  PredicateId predicate = 0;
  std::vector<EntityId> args;
  auto operator<=>(const GroundAtom&) const = default;
};

struct LabeledTuple {
  std::vector<EntityId> args;
  bool positive = false;
  bool operator==(const LabeledTuple&) const = default;
};

// Immutable after parse; safe for shared concurrent reads.
class KnowledgeBase {
 public:
  const std::vector<PredicateSchema>& schemas() const { return schemas_; }
  const PredicateSchema& schema(PredicateId p) const { return schemas_[p]; }
  std::optional<PredicateId> predicate_id(const std::string& name) const;

  std::size_t num_entities() const { return symbols_.size(); }
  const std::string& entity_symbol(EntityId e) const { return symbols_[e]; }
  const std::string& entity_type(EntityId e) const { return etypes_[e]; }
  std::optional<EntityId> entity_id(const std::string& symbol) const;

  const std::vector<GroundAtom>& facts() const { return facts_; }
  bool has_fact(const GroundAtom& a) const;

  bool has_target() const { return target_.has_value(); }
  PredicateId target_id() const;
  const PredicateSchema& target_schema() const { return schemas_[target_id()]; }

  // Entities whose type is compatible with `slot_type`, ascending by id.
  std::vector<EntityId> entities_compatible(const std::string& slot_type) const;

  // Fact indexes used by the grounding engine.
  const std::vector<std::uint32_t>& facts_of(PredicateId p) const { return by_pred_[p]; }
  const std::vector<std::uint32_t>& facts_of(PredicateId p, int pos, EntityId e) const;

  // Canonical form: @target, @schema lines sorted by name, facts sorted
  // lexicographically. Reparsing yields an equal KB.
  std::string serialize() const;

  std::string render_fact(const GroundAtom& a) const;

  friend KnowledgeBase parse_facts(const std::string& text);

 private:
  std::vector<PredicateSchema> schemas_;
  std::unordered_map<std::string, PredicateId> pred_ids_;
  std::vector<std::string> symbols_;
  std::vector<std::string> etypes_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::vector<GroundAtom> facts_;  // sorted, duplicate-free
  std::optional<PredicateId> target_;

  std::vector<std::vector<std::uint32_t>> by_pred_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_pred_pos_entity_;

  void build_indexes();
};

// Fact file format: one `Pred(c1, ..., cn).` per line (trailing period
// optional), `%` comments, `@schema Pred(type1, ..., typen)` and
// `@target Pred` headers. Undeclared predicates get their arity from first
// use and `untyped` argument types.
KnowledgeBase parse_facts(const std::string& text);
KnowledgeBase parse_facts_file(const std::string& path);

// Argument tuples of target facts, labeled positive, sorted by symbols.
std::vector<LabeledTuple> positive_tuples(const KnowledgeBase& kb);

// Uniform sample without replacement of type-compatible tuples whose target
// atom is not a fact. Never emits (a,a) for a binary target over one type.
std::vector<LabeledTuple> generate_negatives(const KnowledgeBase& kb, double ratio,
                                             std::uint64_t seed);

}  // namespace gaifman
