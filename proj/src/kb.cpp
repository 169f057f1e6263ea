#include "gaifman/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gaifman {

namespace {

bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

struct LineScanner {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  bool accept(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && ident_char(s[i])) ++i;
    return s.substr(start, i - start);
  }
};

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

// Parses `Name(tok1, ..., tokn)`; returns name + tokens.
std::pair<std::string, std::vector<std::string>> parse_atom(LineScanner& sc, int line_no) {
  std::string name = sc.ident();
  if (name.empty()) fail(line_no, "expected identifier");
  if (!sc.accept('(')) fail(line_no, "expected '(' after '" + name + "'");
  std::vector<std::string> toks;
  while (true) {
    std::string t = sc.ident();
    if (t.empty()) fail(line_no, "expected argument in '" + name + "(...)'");
    toks.push_back(std::move(t));
    if (sc.accept(',')) continue;
    if (sc.accept(')')) break;
    fail(line_no, "expected ',' or ')' in '" + name + "(...)'");
  }
  return {std::move(name), std::move(toks)};
}

std::uint64_t index_key(PredicateId p, int pos, EntityId e) {
  return (static_cast<std::uint64_t>(p) << 36) | (static_cast<std::uint64_t>(pos) << 32) |
         static_cast<std::uint64_t>(e);
}

}  // namespace

std::optional<PredicateId> KnowledgeBase::predicate_id(const std::string& name) const {
  auto it = pred_ids_.find(name);
  if (it == pred_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityId> KnowledgeBase::entity_id(const std::string& symbol) const {
  auto it = entity_ids_.find(symbol);
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

bool KnowledgeBase::has_fact(const GroundAtom& a) const {
  return std::binary_search(facts_.begin(), facts_.end(), a);
}

PredicateId KnowledgeBase::target_id() const {
  if (!target_) throw ConfigError("no @target declared in fact file");
  return *target_;
}

std::vector<EntityId> KnowledgeBase::entities_compatible(const std::string& slot_type) const {
  std::vector<EntityId> out;
  for (EntityId e = 0; e < symbols_.size(); ++e)
    if (type_compatible(etypes_[e], slot_type)) out.push_back(e);
  return out;
}

const std::vector<std::uint32_t>& KnowledgeBase::facts_of(PredicateId p, int pos,
                                                          EntityId e) const {
  static const std::vector<std::uint32_t> empty;
  auto it = by_pred_pos_entity_.find(index_key(p, pos, e));
  return it == by_pred_pos_entity_.end() ? empty : it->second;
}

void KnowledgeBase::build_indexes() {
  by_pred_.assign(schemas_.size(), {});
  for (std::uint32_t f = 0; f < facts_.size(); ++f) {
    const GroundAtom& a = facts_[f];
    by_pred_[a.predicate].push_back(f);
    for (int pos = 0; pos < static_cast<int>(a.args.size()); ++pos)
      by_pred_pos_entity_[index_key(a.predicate, pos, a.args[pos])].push_back(f);
  }
}

std::string KnowledgeBase::render_fact(const GroundAtom& a) const {
  std::string out = schemas_[a.predicate].name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += symbols_[a.args[i]];
  }
  out += ").";
  return out;
}

std::string KnowledgeBase::serialize() const {
  std::ostringstream os;
  if (target_) os << "@target " << schemas_[*target_].name << "\n";
  std::vector<const PredicateSchema*> sorted;
  for (const auto& s : schemas_) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });
  for (const auto* s : sorted) {
    os << "@schema " << s->name << "(";
    for (int i = 0; i < s->arity(); ++i) {
      if (i) os << ", ";
      os << s->arg_types[i];
    }
    os << ")\n";
  }
  std::vector<std::string> lines;
  lines.reserve(facts_.size());
  for (const auto& f : facts_) lines.push_back(render_fact(f));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

KnowledgeBase parse_facts(const std::string& text) {
  KnowledgeBase kb;
  struct RawFact {
    std::string pred;
    std::vector<std::string> args;
    int line_no;
  };
  std::vector<RawFact> raw;
  std::string target_name;
  int target_line = 0;

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto p = line.find('%'); p != std::string::npos) line.resize(p);
    LineScanner sc{line};
    if (sc.done()) continue;
    if (sc.accept('@')) {
      std::string kw = sc.ident();
      if (kw == "schema") {
        auto [name, types] = parse_atom(sc, line_no);
        if (!sc.done()) fail(line_no, "trailing characters after @schema");
        if (auto existing = kb.predicate_id(name)) {
          const auto& s = kb.schemas_[*existing];
          if (s.arity() != static_cast<int>(types.size()))
            fail(line_no, "arity mismatch: '" + name + "' declared/" +
                              std::to_string(types.size()) + " vs seen/" +
                              std::to_string(s.arity()));
          kb.schemas_[*existing].arg_types = types;
          kb.schemas_[*existing].declared = true;
        } else {
          kb.pred_ids_[name] = static_cast<PredicateId>(kb.schemas_.size());
          kb.schemas_.push_back({name, types, true});
        }
      } else if (kw == "target") {
        target_name = sc.ident();
        if (target_name.empty()) fail(line_no, "expected predicate name after @target");
        target_line = line_no;
      } else {
        fail(line_no, "unknown directive '@" + kw + "'");
      }
      continue;
    }
    auto [name, args] = parse_atom(sc, line_no);
    sc.accept('.');
    if (!sc.done()) fail(line_no, "trailing characters after fact");
    if (name[0] == '_') fail(line_no, "predicate names may not start with '_'");
    raw.push_back({std::move(name), std::move(args), line_no});
  }

  // Predicate table: declared schemas first, then first-use inference.
  for (const auto& rf : raw) {
    auto id = kb.predicate_id(rf.pred);
    if (!id) {
      kb.pred_ids_[rf.pred] = static_cast<PredicateId>(kb.schemas_.size());
      kb.schemas_.push_back(
          {rf.pred, std::vector<std::string>(rf.args.size(), kUntyped), false});
    } else if (kb.schemas_[*id].arity() != static_cast<int>(rf.args.size())) {
      fail(rf.line_no, "arity mismatch: '" + rf.pred + "' used with " +
                           std::to_string(rf.args.size()) + " args, schema has " +
                           std::to_string(kb.schemas_[*id].arity()));
    }
  }

  // Intern entities in order of first appearance.
  for (const auto& rf : raw)
    for (const auto& sym : rf.args)
      if (!kb.entity_ids_.count(sym)) {
        kb.entity_ids_[sym] = static_cast<EntityId>(kb.symbols_.size());
        kb.symbols_.push_back(sym);
      }

  // Entity types from argument positions; order-independent: a single
  // distinct declared type wins, any conflict downgrades to untyped.
  std::vector<std::set<std::string>> seen_types(kb.symbols_.size());
  for (const auto& rf : raw) {
    const auto& schema = kb.schemas_[*kb.predicate_id(rf.pred)];
    for (std::size_t i = 0; i < rf.args.size(); ++i) {
      const std::string& t = schema.arg_types[i];
      if (t != kUntyped) seen_types[kb.entity_ids_[rf.args[i]]].insert(t);
    }
  }
  kb.etypes_.resize(kb.symbols_.size());
  for (std::size_t e = 0; e < kb.symbols_.size(); ++e)
    kb.etypes_[e] = seen_types[e].size() == 1 ? *seen_types[e].begin() : kUntyped;

  // Fact set: sorted, duplicates collapsed.
  for (const auto& rf : raw) {
    GroundAtom a;
    a.predicate = *kb.predicate_id(rf.pred);
    for (const auto& sym : rf.args) a.args.push_back(kb.entity_ids_[sym]);
    kb.facts_.push_back(std::move(a));
  }
  std::sort(kb.facts_.begin(), kb.facts_.end());
  kb.facts_.erase(std::unique(kb.facts_.begin(), kb.facts_.end()), kb.facts_.end());

  if (!target_name.empty()) {
    auto id = kb.predicate_id(target_name);
    if (!id) fail(target_line, "@target '" + target_name + "' names no known predicate");
    kb.target_ = *id;
  }

  kb.build_indexes();
  return kb;
}

KnowledgeBase parse_facts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open fact file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_facts(ss.str());
}

std::vector<LabeledTuple> positive_tuples(const KnowledgeBase& kb) {
  PredicateId t = kb.target_id();
  std::vector<LabeledTuple> out;
  for (std::uint32_t f : kb.facts_of(t)) out.push_back({kb.facts()[f].args, true});
  std::sort(out.begin(), out.end(), [&](const LabeledTuple& a, const LabeledTuple& b) {
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const auto& sa = kb.entity_symbol(a.args[i]);
      const auto& sb = kb.entity_symbol(b.args[i]);
      if (sa != sb) return sa < sb;
    }
    return false;
  });
  return out;
}

std::vector<LabeledTuple> generate_negatives(const KnowledgeBase& kb, double ratio,
                                             std::uint64_t seed) {
  const PredicateSchema& ts = kb.target_schema();
  const PredicateId tid = kb.target_id();
  const std::size_t npos = kb.facts_of(tid).size();
  const std::size_t want = static_cast<std::size_t>(std::llround(ratio * double(npos)));
  if (want == 0) return {};

  std::vector<std::vector<EntityId>> domains;
  for (const auto& t : ts.arg_types) domains.push_back(kb.entities_compatible(t));
  const bool skip_reflexive = ts.arity() == 2 && ts.arg_types[0] == ts.arg_types[1];

  double total = 1;
  for (const auto& d : domains) total *= double(d.size());

  auto is_candidate = [&](const std::vector<EntityId>& args) {
    if (skip_reflexive && args[0] == args[1]) return false;
    return !kb.has_fact({tid, args});
  };

  std::vector<LabeledTuple> out;
  Rng rng(seed);

  if (total <= 4e6) {
    std::vector<std::vector<EntityId>> candidates;
    std::vector<std::size_t> cursor(domains.size(), 0);
    std::vector<EntityId> args(domains.size());
    bool any_empty = false;
    for (const auto& d : domains) any_empty |= d.empty();
    if (!any_empty) {
      while (true) {
        for (std::size_t i = 0; i < domains.size(); ++i) args[i] = domains[i][cursor[i]];
        if (is_candidate(args)) candidates.push_back(args);
        std::size_t i = domains.size();
        while (i > 0 && ++cursor[i - 1] == domains[i - 1].size()) cursor[--i] = 0;
        if (i == 0) break;
      }
    }
    if (candidates.empty()) {
      warn("generate_negatives: no type-compatible unobserved tuples");
      return {};
    }
    for (std::size_t idx : rng.sample_indices(candidates.size(), want))
      out.push_back({candidates[idx], false});
  } else {
    std::set<std::vector<EntityId>> drawn;
    std::size_t attempts = 0, budget = 60 * want + 1000;
    std::vector<EntityId> args(domains.size());
    while (drawn.size() < want && attempts++ < budget) {
      for (std::size_t i = 0; i < domains.size(); ++i) args[i] = domains[i][rng.index(domains[i].size())];
      if (is_candidate(args)) drawn.insert(args);
    }
    if (drawn.size() < want)
      warn("generate_negatives: sampled " + std::to_string(drawn.size()) + " of " +
           std::to_string(want) + " requested negatives");
    if (drawn.empty() && want > 0) {
      warn("generate_negatives: no type-compatible unobserved tuples");
      return {};
    }
    for (const auto& a : drawn) out.push_back({a, false});
  }

  std::sort(out.begin(), out.end(), [&](const LabeledTuple& a, const LabeledTuple& b) {
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const auto& sa = kb.entity_symbol(a.args[i]);
      const auto& sb = kb.entity_symbol(b.args[i]);
      if (sa != sb) return sa < sb;
    }
    return false;
  });
  return out;
}

}  // namespace gaifman
