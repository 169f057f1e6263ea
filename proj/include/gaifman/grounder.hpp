#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaifman/clause.hpp"
#include "gaifman/graph.hpp"
#include "gaifman/kb.hpp"

namespace gaifman {

// A clause with the query tuple substituted for its head variables; body
// variables stay free. `groundable` is false when the tuple's entity types
// do not match the head variable types (the feature then counts 0).
struct PartiallyGrounded {
  Clause clause;
  std::vector<std::int64_t> binding;  // var index -> entity id, -1 = free
  std::vector<int> free_vars;         // ascending var indices
  bool groundable = true;
};

PartiallyGrounded partial_ground(const Clause& clause, const std::vector<EntityId>& tuple,
                                 const KnowledgeBase& kb);

// Assignment of every free variable, as (var index, entity) sorted by var.
using Substitution = std::vector<std::pair<int, EntityId>>;

// All substitutions of the free variables under which every body literal
// (inverse literals matched argument-reversed) is a fact. Backtracking over
// the per-predicate/argument fact index, most-constrained literal first;
// returned in a canonical sorted order.
std::vector<Substitution> satisfying_groundings(const PartiallyGrounded& pg,
                                                const KnowledgeBase& kb);

bool has_grounding(const PartiallyGrounded& pg, const KnowledgeBase& kb);

// |{ satisfying substitutions whose bound entities all lie in nb.members }|
std::int64_t count_in_neighborhood(const PartiallyGrounded& pg, const KnowledgeBase& kb,
                                   const NeighborhoodSample& nb);

struct EmbeddingRow {
  std::vector<EntityId> tuple;
  int neighborhood_index = 0;
  std::vector<std::int64_t> counts;  // one per feature clause
  bool positive = false;
};

// The embedding pipeline: build the Gaifman graph, draw w neighborhoods per
// tuple (positives first, then negatives, each sorted by symbols), and fill
// one row per (tuple, neighborhood) with per-feature grounding counts.
// Deterministic for a given seed regardless of `threads`.
std::vector<EmbeddingRow> embed_tuples(const KnowledgeBase& kb, const std::vector<Clause>& features,
                                       const std::vector<LabeledTuple>& pos,
                                       const std::vector<LabeledTuple>& neg, int r, int k, int w,
                                       std::uint64_t seed, int threads = 1);

// CSV with header `tuple,neighborhood,label,f1..f{n}`; tuple entities joined
// by '|'. The JSON-lines variant carries the same fields.
std::string embedding_csv(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows,
                          std::size_t num_features);
std::string embedding_jsonl(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows);

}  // namespace gaifman
