#include "gaifman/ilp.hpp"

#include <algorithm>
#include <set>

#include "gaifman/grounder.hpp"

namespace gaifman {

bool covers(const Clause& clause, const LabeledTuple& tuple, const KnowledgeBase& kb) {
  return has_grounding(partial_ground(clause, tuple.args, kb), kb);
}

ClauseScore score_clause(const Clause& clause, const std::vector<LabeledTuple>& pos,
                         const std::vector<LabeledTuple>& neg, const KnowledgeBase& kb) {
  ClauseScore s;
  for (const auto& t : pos) s.pos_covered += covers(clause, t, kb);
  for (const auto& t : neg) s.neg_covered += covers(clause, t, kb);
  return s;
}

namespace {

struct Candidate {
  Clause clause;
  std::string serial;  // canonical, for ordering and dedup
  ClauseScore score;
  bool emittable = false;  // head vars bound in body, covers >= 1 positive
};

// Total order: better score first, then shorter, then lexicographic.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score.score() != b.score.score()) return a.score.score() > b.score.score();
  if (a.clause.body.size() != b.clause.body.size())
    return a.clause.body.size() < b.clause.body.size();
  return a.serial < b.serial;
}

}  // namespace

std::vector<Clause> learn_clauses(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                                  const std::vector<LabeledTuple>& neg, const IlpOptions& opt) {
  if (opt.max_rules < 1 || opt.max_len < 1 || opt.beam_width < 1)
    throw std::invalid_argument("learn_clauses: max_rules, max_len, beam_width must be >= 1");

  std::vector<LabeledTuple> remaining = pos;
  std::vector<Clause> rules;

  while (static_cast<int>(rules.size()) < opt.max_rules && !remaining.empty()) {
    Candidate root{make_head_clause(kb, RuleSource::ilp), "",
                   {static_cast<int>(remaining.size()), static_cast<int>(neg.size())}};
    root.serial = root.clause.canonical().serialize();

    std::vector<Candidate> beam{root};
    Candidate best;
    bool have_best = false;

    for (int level = 1; level <= opt.max_len; ++level) {
      std::vector<Candidate> next;
      std::set<std::string> seen;
      for (const Candidate& parent : beam) {
        for (const CandidateLiteral& cl :
             candidate_literals(kb, parent.clause.var_types, true, &parent.clause.body)) {
          Candidate child;
          child.clause = extend_clause(parent.clause, cl);
          child.serial = child.clause.canonical().serialize();
          if (!seen.insert(child.serial).second) continue;
          child.score = score_clause(child.clause, remaining, neg, kb);
          child.emittable =
              child.clause.head_vars_in_body() && child.score.pos_covered >= 1;
          next.push_back(std::move(child));
        }
      }
      if (next.empty()) break;
      std::sort(next.begin(), next.end(), better);
      if (static_cast<int>(next.size()) > opt.beam_width) next.resize(opt.beam_width);
      for (const Candidate& c : next)
        if (c.emittable && (!have_best || better(c, best))) {
          best = c;
          have_best = true;
        }
      beam = std::move(next);
    }

    if (!have_best || best.score.score() < opt.min_score) break;

    std::vector<LabeledTuple> still;
    for (const auto& t : remaining)
      if (!covers(best.clause, t, kb)) still.push_back(t);
    if (still.size() == remaining.size()) break;  // no progress; avoid looping
    remaining = std::move(still);
    rules.push_back(best.clause.canonical());
  }
  return rules;
}

}  // namespace gaifman
