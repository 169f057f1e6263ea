#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaifman/kb.hpp"

namespace gaifman {

// Variables are clause-local indices; constants carry their symbol.
// Convention in clause text: lowercase-initial identifiers are variables,
// anything else is a constant.
struct Term {
  enum class Kind : std::uint8_t { Var, Const };
  Kind kind = Kind::Var;
  int var = -1;
  std::string symbol;

  static Term variable(int idx) { return {Kind::Var, idx, {}}; }
  static Term constant(std::string sym) { return {Kind::Const, -1, std::move(sym)}; }
  bool is_var() const { return kind == Kind::Var; }
  bool operator==(const Term&) const = default;
};

// An inverse literal `_P(x, y)` matches facts P(y, x): argument order is the
// traversal order, fact order is the reverse.
struct Literal {
  std::string predicate;
  bool inverse = false;
  std::vector<Term> args;
  bool operator==(const Literal&) const = default;
};

enum class RuleSource { rw, ilp, relocc };

struct Clause {
  Literal head;  // never inverse; args are variables
  std::vector<Literal> body;
  std::vector<std::string> var_names;  // indexed by variable id
  std::vector<std::string> var_types;
  RuleSource source = RuleSource::ilp;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int head_arity() const { return static_cast<int>(head.args.size()); }

  // `Head(d0,d1) :- Lit(d0,v2), _Lit(v2,d1).`
  std::string serialize() const;

  // Variables renamed by first occurrence: head vars d0..d{k-1}, body-only
  // vars v{k}... Used for dedup, tie-breaking and file output.
  Clause canonical() const;

  bool head_vars_in_body() const;
};

std::string serialize_clauses(const std::vector<Clause>& clauses);

// Parses the shared clause text format; predicate names must exist in the
// KB schema and variable types are inferred from it (inverse literals type
// with reversed positions). Throws ParseError on malformed input, unknown
// predicates or variable type conflicts.
std::vector<Clause> parse_clauses(const std::string& text, const KnowledgeBase& kb);
Clause parse_clause(const std::string& text, const KnowledgeBase& kb);

// Top-down refinement step shared by the ILP coverer and the relational
// tree learner: all type-sound literals over the KB schema that share at
// least one existing variable; unshared positions get fresh variables
// (indices continue after var_types). `body` filters out literals already
// present.
struct CandidateLiteral {
  Literal lit;
  std::vector<std::pair<int, std::string>> fresh;  // new var index -> type
};
std::vector<CandidateLiteral> candidate_literals(const KnowledgeBase& kb,
                                                 const std::vector<std::string>& var_types,
                                                 bool exclude_target = true,
                                                 const std::vector<Literal>* body = nullptr);

// Appends a candidate to a clause, registering its fresh variables.
Clause extend_clause(const Clause& c, const CandidateLiteral& cand);

// Bodyless clause `Target(d0, ..)` over the target schema's query variables.
Clause make_head_clause(const KnowledgeBase& kb, RuleSource source);

}  // namespace gaifman
