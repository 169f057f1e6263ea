#pragma once

#include <vector>

#include "gaifman/clause.hpp"
#include "gaifman/kb.hpp"

namespace gaifman {

// Existential coverage: the tuple substituted into the head leaves a body
// with at least one satisfying grounding. An empty body covers everything.
bool covers(const Clause& clause, const LabeledTuple& tuple, const KnowledgeBase& kb);

struct ClauseScore {
  int pos_covered = 0;
  int neg_covered = 0;
  int score() const { return pos_covered - neg_covered; }
};

ClauseScore score_clause(const Clause& clause, const std::vector<LabeledTuple>& pos,
                         const std::vector<LabeledTuple>& neg, const KnowledgeBase& kb);

struct IlpOptions {
  int max_rules = 8;
  int max_len = 3;
  int beam_width = 10;
  int min_score = 1;
};

// Greedy sequential covering: each round beam-searches (top-down literal
// refinement) for the clause maximizing pos_covered - neg_covered over the
// remaining positives and all negatives, removes the positives it covers,
// and repeats until max_rules, exhaustion, or no clause scores >= min_score.
// Ties break toward fewer literals, then lexicographic serialization.
std::vector<Clause> learn_clauses(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                                  const std::vector<LabeledTuple>& neg, const IlpOptions& opt);

}  // namespace gaifman
