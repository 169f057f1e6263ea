#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaifman/clause.hpp"
#include "gaifman/kb.hpp"

namespace gaifman {

// One traversal direction of a predicate between two argument positions.
// Binary predicates get the forward edge (0,1) labeled P and the backward
// edge (1,0) labeled _P; an n-ary predicate gets an edge for every ordered
// pair of distinct positions.
struct SchemaEdge {
  PredicateId pred = 0;
  int from_pos = 0;
  int to_pos = 0;
  std::string from_type;
  std::string to_type;
  bool inverse = false;  // binary back-edge label
};

// Directed multigraph over entity-type names; target predicate excluded.
class SchemaGraph {
 public:
  static SchemaGraph build(const KnowledgeBase& kb);

  const std::vector<SchemaEdge>& edges() const { return edges_; }
  // Edges leaving `type`, in deterministic construction order.
  std::vector<const SchemaEdge*> out_edges(const std::string& type) const;

 private:
  std::vector<SchemaEdge> edges_;
};

// Type-sound chains from the target's first argument type to its second:
// each step's input type equals the previous step's output type; fresh
// intermediate variables; binary back-steps emit inverse literals. Distinct
// clauses only (canonical dedup), sorted by serialization; at most n_walks,
// drawn within a 100x attempt budget.
std::vector<Clause> sample_walks(const SchemaGraph& sg, const KnowledgeBase& kb, int max_len,
                                 int n_walks, std::uint64_t seed);

// Replays a chain clause through the schema graph; true when every step
// matches an edge and the chain runs d0 -> ... -> d1 with correct types.
bool replay_type_sound(const SchemaGraph& sg, const KnowledgeBase& kb, const Clause& c);

}  // namespace gaifman
