#include "gaifman/walks.hpp"

#include <algorithm>
#include <set>

namespace gaifman {

SchemaGraph SchemaGraph::build(const KnowledgeBase& kb) {
  SchemaGraph sg;
  for (PredicateId p = 0; p < kb.schemas().size(); ++p) {
    if (kb.has_target() && p == kb.target_id()) continue;
    const PredicateSchema& s = kb.schema(p);
    const int n = s.arity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        SchemaEdge e;
        e.pred = p;
        e.from_pos = i;
        e.to_pos = j;
        e.from_type = s.arg_types[i];
        e.to_type = s.arg_types[j];
        e.inverse = (n == 2 && i == 1 && j == 0);
        sg.edges_.push_back(std::move(e));
      }
  }
  return sg;
}

std::vector<const SchemaEdge*> SchemaGraph::out_edges(const std::string& type) const {
  std::vector<const SchemaEdge*> out;
  for (const SchemaEdge& e : edges_)
    if (e.from_type == type) out.push_back(&e);
  return out;
}

std::vector<Clause> sample_walks(const SchemaGraph& sg, const KnowledgeBase& kb, int max_len,
                                 int n_walks, std::uint64_t seed) {
  if (max_len < 1 || n_walks < 1)
    throw std::invalid_argument("sample_walks requires max_len >= 1 and n_walks >= 1");
  const PredicateSchema& ts = kb.target_schema();
  if (ts.arity() != 2) throw std::invalid_argument("sample_walks requires a binary target");
  const std::string& start_type = ts.arg_types[0];
  const std::string& end_type = ts.arg_types[1];

  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<Clause> out;
  const long budget = 100L * n_walks;

  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < n_walks; ++attempt) {
    const int len = 1 + static_cast<int>(rng.index(max_len));
    Clause c;
    c.source = RuleSource::rw;
    c.head.predicate = ts.name;
    c.head.args = {Term::variable(0), Term::variable(1)};
    c.var_names = {"d0", "d1"};
    c.var_types = {start_type, end_type};

    std::string cur_type = start_type;
    int chain_var = 0;
    bool ok = true;
    for (int step = 1; step <= len && ok; ++step) {
      auto outs = sg.out_edges(cur_type);
      if (outs.empty()) {
        ok = false;
        break;
      }
      const SchemaEdge& e = *outs[rng.index(outs.size())];
      const PredicateSchema& ps = kb.schema(e.pred);
      int out_var;
      if (step == len) {
        out_var = 1;
      } else {
        out_var = c.num_vars();
        c.var_names.push_back("v" + std::to_string(out_var));
        c.var_types.push_back(e.to_type);
      }
      Literal lit;
      lit.predicate = ps.name;
      if (ps.arity() == 2) {
        lit.inverse = e.inverse;
        lit.args = {Term::variable(chain_var), Term::variable(out_var)};
      } else {
        lit.args.resize(ps.arity());
        for (int pos = 0; pos < ps.arity(); ++pos) {
          if (pos == e.from_pos) {
            lit.args[pos] = Term::variable(chain_var);
          } else if (pos == e.to_pos) {
            lit.args[pos] = Term::variable(out_var);
          } else {
            int filler = c.num_vars();
            c.var_names.push_back("v" + std::to_string(filler));
            c.var_types.push_back(ps.arg_types[pos]);
            lit.args[pos] = Term::variable(filler);
          }
        }
      }
      c.body.push_back(std::move(lit));
      cur_type = e.to_type;
      chain_var = out_var;
    }
    if (!ok || cur_type != end_type) continue;

    Clause canon = c.canonical();
    std::string key = canon.serialize();
    if (seen.insert(key).second) out.push_back(std::move(canon));
  }

  if (out.empty()) warn("sample_walks: no type-sound walk of length <= " +
                        std::to_string(max_len) + " found within budget");
  std::sort(out.begin(), out.end(),
            [](const Clause& a, const Clause& b) { return a.serialize() < b.serialize(); });
  return out;
}

bool replay_type_sound(const SchemaGraph& sg, const KnowledgeBase& kb, const Clause& c) {
  if (c.head_arity() != 2 || c.body.empty()) return false;
  const PredicateSchema& ts = kb.target_schema();
  if (c.head.predicate != ts.name) return false;

  auto find_edge = [&](PredicateId p, int from, int to) -> const SchemaEdge* {
    for (const SchemaEdge& e : sg.edges())
      if (e.pred == p && e.from_pos == from && e.to_pos == to) return &e;
    return nullptr;
  };

  int cur_var = c.head.args[0].var;
  const int final_var = c.head.args[1].var;
  std::string cur_type = ts.arg_types[0];

  for (std::size_t i = 0; i < c.body.size(); ++i) {
    const Literal& lit = c.body[i];
    auto pid = kb.predicate_id(lit.predicate);
    if (!pid) return false;
    const bool last = (i + 1 == c.body.size());

    // Locate the chain-in and chain-out argument slots (traversal order).
    int in_slot = -1;
    for (std::size_t j = 0; j < lit.args.size(); ++j)
      if (lit.args[j].is_var() && lit.args[j].var == cur_var) in_slot = static_cast<int>(j);
    if (in_slot < 0) return false;

    int next_var = -1, out_slot = -1;
    for (std::size_t j = 0; j < lit.args.size(); ++j) {
      if (static_cast<int>(j) == in_slot || !lit.args[j].is_var()) continue;
      int v = lit.args[j].var;
      bool links = last ? (v == final_var) : [&] {
        const Literal& nxt = c.body[i + 1];
        for (const Term& t : nxt.args)
          if (t.is_var() && t.var == v) return true;
        return false;
      }();
      if (links) {
        next_var = v;
        out_slot = static_cast<int>(j);
        break;
      }
    }
    if (next_var < 0) return false;

    // Map traversal slots to fact positions (inverse literals are reversed).
    int arity = static_cast<int>(lit.args.size());
    int from_pos = lit.inverse ? arity - 1 - in_slot : in_slot;
    int to_pos = lit.inverse ? arity - 1 - out_slot : out_slot;
    const SchemaEdge* e = find_edge(*pid, from_pos, to_pos);
    if (!e || e->from_type != cur_type) return false;
    cur_type = e->to_type;
    cur_var = next_var;
  }
  return cur_var == final_var && cur_type == ts.arg_types[1];
}

}  // namespace gaifman
