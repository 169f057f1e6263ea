#include "gaifman/clause.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gaifman {

namespace {

void render_literal(std::ostringstream& os, const Literal& lit,
                    const std::vector<std::string>& var_names) {
  if (lit.inverse) os << '_';
  os << lit.predicate << '(';
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    if (i) os << ',';
    const Term& t = lit.args[i];
    if (t.is_var())
      os << var_names[t.var];
    else
      os << t.symbol;
  }
  os << ')';
}

}  // namespace

std::string Clause::serialize() const {
  std::ostringstream os;
  render_literal(os, head, var_names);
  if (!body.empty()) {
    os << " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) os << ", ";
      render_literal(os, body[i], var_names);
    }
  }
  os << '.';
  return os.str();
}

Clause Clause::canonical() const {
  Clause out;
  out.source = source;
  std::vector<int> remap(var_names.size(), -1);
  int next = 0;
  auto visit = [&](const Term& t) {
    if (t.is_var() && remap[t.var] < 0) remap[t.var] = next++;
  };
  for (const Term& t : head.args) visit(t);
  for (const Literal& l : body)
    for (const Term& t : l.args) visit(t);

  out.var_names.resize(next);
  out.var_types.resize(next);
  const int k = head_arity();
  for (std::size_t old = 0; old < remap.size(); ++old) {
    int nv = remap[old];
    if (nv < 0) continue;
    out.var_names[nv] = (nv < k ? "d" : "v") + std::to_string(nv);
    out.var_types[nv] = var_types[old];
  }
  auto rewrite = [&](const Literal& l) {
    Literal r = l;
    for (Term& t : r.args)
      if (t.is_var()) t.var = remap[t.var];
    return r;
  };
  out.head = rewrite(head);
  for (const Literal& l : body) out.body.push_back(rewrite(l));
  return out;
}

bool Clause::head_vars_in_body() const {
  for (const Term& h : head.args) {
    bool found = false;
    for (const Literal& l : body)
      for (const Term& t : l.args)
        if (t.is_var() && h.is_var() && t.var == h.var) found = true;
    if (!found) return false;
  }
  return true;
}

std::string serialize_clauses(const std::vector<Clause>& clauses) {
  std::string out;
  for (const auto& c : clauses) out += c.serialize() + "\n";
  return out;
}

namespace {

bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

struct ClauseScanner {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size()) {
      if (s[i] == '%') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else {
        break;
      }
    }
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
  bool accept_neck() {  // ":-"
    skip_ws();
    if (i + 1 < s.size() && s[i] == ':' && s[i + 1] == '-') {
      i += 2;
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

struct ClauseBuilder {
  const KnowledgeBase& kb;
  Clause c;
  std::map<std::string, int> vars;

  int var_index(const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int idx = static_cast<int>(c.var_names.size());
    vars[name] = idx;
    c.var_names.push_back(name);
    c.var_types.push_back(kUntyped);
    return idx;
  }

  void merge_type(int var, const std::string& t) {
    if (t == kUntyped) return;
    std::string& cur = c.var_types[var];
    if (cur == kUntyped)
      cur = t;
    else if (cur != t)
      throw ParseError("type conflict for variable '" + c.var_names[var] + "': " + cur +
                       " vs " + t);
  }

  Literal parse_literal(ClauseScanner& sc, bool allow_inverse) {
    Literal lit;
    sc.skip_ws();
    if (sc.i < sc.s.size() && sc.s[sc.i] == '_') {
      if (!allow_inverse) throw ParseError("head literal may not be inverse");
      lit.inverse = true;
      ++sc.i;
    }
    lit.predicate = sc.ident();
    if (lit.predicate.empty()) throw ParseError("expected predicate name");
    auto pid = kb.predicate_id(lit.predicate);
    if (!pid) throw ParseError("unknown predicate '" + lit.predicate + "' in clause");
    if (!sc.accept('(')) throw ParseError("expected '(' after '" + lit.predicate + "'");
    const PredicateSchema& schema = kb.schema(*pid);
    while (true) {
      std::string tok = sc.ident();
      if (tok.empty()) throw ParseError("expected term in '" + lit.predicate + "(...)'");
      if (tok[0] >= 'a' && tok[0] <= 'z') {
        int v = var_index(tok);
        lit.args.push_back(Term::variable(v));
      } else {
        lit.args.push_back(Term::constant(tok));
      }
      if (sc.accept(',')) continue;
      if (sc.accept(')')) break;
      throw ParseError("expected ',' or ')' in '" + lit.predicate + "(...)'");
    }
    if (static_cast<int>(lit.args.size()) != schema.arity())
      throw ParseError("arity mismatch for '" + lit.predicate + "' in clause");
    for (std::size_t j = 0; j < lit.args.size(); ++j) {
      std::size_t pos = lit.inverse ? lit.args.size() - 1 - j : j;
      if (lit.args[j].is_var()) merge_type(lit.args[j].var, schema.arg_types[pos]);
    }
    return lit;
  }
};

}  // namespace

std::vector<Clause> parse_clauses(const std::string& text, const KnowledgeBase& kb) {
  std::vector<Clause> out;
  ClauseScanner sc{text};
  while (!sc.done()) {
    ClauseBuilder b{kb, {}, {}};
    b.c.head = b.parse_literal(sc, false);
    for (const Term& t : b.c.head.args)
      if (!t.is_var()) throw ParseError("head arguments must be variables");
    if (sc.accept_neck()) {
      while (true) {
        b.c.body.push_back(b.parse_literal(sc, true));
        if (sc.accept(',')) continue;
        break;
      }
    }
    if (!sc.accept('.')) throw ParseError("expected '.' at end of clause");
    out.push_back(std::move(b.c));
  }
  return out;
}

Clause parse_clause(const std::string& text, const KnowledgeBase& kb) {
  auto cs = parse_clauses(text, kb);
  if (cs.size() != 1) throw ParseError("expected exactly one clause");
  return cs[0];
}

std::vector<CandidateLiteral> candidate_literals(const KnowledgeBase& kb,
                                                 const std::vector<std::string>& var_types,
                                                 bool exclude_target,
                                                 const std::vector<Literal>* body) {
  std::vector<CandidateLiteral> out;
  const int nvars = static_cast<int>(var_types.size());
  for (PredicateId p = 0; p < kb.schemas().size(); ++p) {
    if (exclude_target && kb.has_target() && p == kb.target_id()) continue;
    const PredicateSchema& s = kb.schema(p);
    const int arity = s.arity();

    // Per position: compatible existing variables, then one fresh slot (-1).
    std::vector<std::vector<int>> options(arity);
    for (int pos = 0; pos < arity; ++pos) {
      for (int v = 0; v < nvars; ++v)
        if (type_compatible(var_types[v], s.arg_types[pos])) options[pos].push_back(v);
      options[pos].push_back(-1);
    }

    std::vector<std::size_t> cursor(arity, 0);
    while (true) {
      CandidateLiteral cand;
      cand.lit.predicate = s.name;
      int shared = 0, next_fresh = nvars;
      for (int pos = 0; pos < arity; ++pos) {
        int v = options[pos][cursor[pos]];
        if (v >= 0) {
          ++shared;
          cand.lit.args.push_back(Term::variable(v));
        } else {
          cand.lit.args.push_back(Term::variable(next_fresh));
          cand.fresh.emplace_back(next_fresh, s.arg_types[pos]);
          ++next_fresh;
        }
      }
      bool duplicate = false;
      if (body)
        for (const Literal& l : *body) duplicate |= (l == cand.lit);
      if (shared > 0 && !duplicate) out.push_back(std::move(cand));

      int i = arity;
      while (i > 0 && ++cursor[i - 1] == options[i - 1].size()) cursor[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

Clause make_head_clause(const KnowledgeBase& kb, RuleSource source) {
  const PredicateSchema& ts = kb.target_schema();
  Clause c;
  c.source = source;
  c.head.predicate = ts.name;
  for (int i = 0; i < ts.arity(); ++i) {
    c.head.args.push_back(Term::variable(i));
    c.var_names.push_back("d" + std::to_string(i));
    c.var_types.push_back(ts.arg_types[i]);
  }
  return c;
}

Clause extend_clause(const Clause& c, const CandidateLiteral& cand) {
  Clause out = c;
  for (const auto& [idx, type] : cand.fresh) {
    if (idx != out.num_vars())
      throw std::logic_error("fresh variable index mismatch in extend_clause");
    std::string name = "v" + std::to_string(idx);
    while (std::find(out.var_names.begin(), out.var_names.end(), name) != out.var_names.end())
      name += "_";
    out.var_names.push_back(std::move(name));
    out.var_types.push_back(type);
  }
  out.body.push_back(cand.lit);
  return out;
}

}  // namespace gaifman
