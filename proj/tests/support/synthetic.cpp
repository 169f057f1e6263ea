#include "support/synthetic.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gaifman/relocc.hpp"

using namespace gaifman;

namespace testsup {

std::string small_ddi_facts() {
  return R"(% drug-interaction fragment
@schema TransportSubstr(drug, transporter)
@schema TransportInhib(drug, transporter)
@schema EnzymeInhib(drug, enzyme)
@schema EnzymeSubstr(drug, enzyme)
@schema Interacts(drug, drug)
@target Interacts
TransportSubstr(Pravastatin, BileSaltExportPump).
TransportInhib(Simvastatin, MultidrugResistProtein1).
EnzymeInhib(Pravastatin, CytochromeP4502C9).
EnzymeSubstr(Acetaminophen, CytochromeP4502C9).
EnzymeInhib(Simvastatin, CytochromeP4502C9).
Interacts(Pravastatin, Simvastatin).
)";
}

namespace {

std::string pad2(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

// One generation attempt; returns the fact text and the positive-pair count.
// Profile sparsity matters: the planted literals must hold for well under
// half of the drugs so that one-class tree splits on them beat balanced
// decoy splits under the squared-error objective.
std::pair<std::string, int> generate_planted(int n_drugs, int n_enzymes, int n_transporters,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::set<int>> substr(n_drugs), inhib(n_drugs);
  for (int d = 0; d < n_drugs; ++d) {
    if (rng.real() < 0.45) {  // substrate profile on a minority of drugs
      int n = 3 + static_cast<int>(rng.index(3));
      for (int i = 0; i < n; ++i) substr[d].insert(static_cast<int>(rng.index(n_enzymes)));
    }
    if (rng.real() < 0.45) {
      int n = 3 + static_cast<int>(rng.index(3));
      for (int i = 0; i < n; ++i) inhib[d].insert(static_cast<int>(rng.index(n_enzymes)));
    }
  }
  std::vector<std::set<int>> tsub(n_drugs), tinh(n_drugs);
  for (int d = 0; d < n_drugs; ++d) {
    if (rng.real() < 0.25) tsub[d].insert(static_cast<int>(rng.index(n_transporters)));
    if (rng.real() < 0.25) tinh[d].insert(static_cast<int>(rng.index(n_transporters)));
  }

  std::ostringstream os;
  os << "@schema EnzymeSubstr(drug, enzyme)\n";
  os << "@schema EnzymeInhib(drug, enzyme)\n";
  os << "@schema TransportSubstr(drug, transporter)\n";
  os << "@schema TransportInhib(drug, transporter)\n";
  os << "@schema Interacts(drug, drug)\n";
  os << "@target Interacts\n";
  for (int d = 0; d < n_drugs; ++d) {
    for (int e : substr[d]) os << "EnzymeSubstr(D" << pad2(d) << ", E" << pad2(e) << ").\n";
    for (int e : inhib[d]) os << "EnzymeInhib(D" << pad2(d) << ", E" << pad2(e) << ").\n";
    for (int t : tsub[d]) os << "TransportSubstr(D" << pad2(d) << ", T" << pad2(t) << ").\n";
    for (int t : tinh[d]) os << "TransportInhib(D" << pad2(d) << ", T" << pad2(t) << ").\n";
  }
  int n_pos = 0;
  for (int x = 0; x < n_drugs; ++x)
    for (int y = 0; y < n_drugs; ++y) {
      if (x == y) continue;
      bool fires = false;
      for (int e : substr[x]) fires |= inhib[y].count(e) > 0;
      if (fires) {
        os << "Interacts(D" << pad2(x) << ", D" << pad2(y) << ").\n";
        ++n_pos;
      }
    }
  return {os.str(), n_pos};
}

}  // namespace

PlantedKb make_planted_kb(int n_drugs, int n_enzymes, int n_transporters, int n_pos,
                          std::uint64_t base_seed) {
  for (std::uint64_t s = base_seed; s < base_seed + 20000; ++s) {
    auto [text, count] = generate_planted(n_drugs, n_enzymes, n_transporters, s);
    if (count == n_pos) return {std::move(text), s};
  }
  throw std::runtime_error("make_planted_kb: no seed yields the requested positive count");
}

KnowledgeBase random_kb(int n_entities, int n_preds, int n_facts, std::uint64_t seed,
                        bool with_target) {
  Rng rng(seed);
  std::ostringstream os;
  std::vector<int> arity(n_preds);
  for (int p = 0; p < n_preds; ++p) {
    // Mostly binary with some unary/ternary; the target (P0) stays binary.
    arity[p] = (p == 0) ? 2 : 1 + static_cast<int>(rng.index(3));
  }
  if (with_target) os << "@target P0\n";
  for (int p = 0; p < n_preds; ++p) {
    os << "@schema P" << p << "(";
    for (int a = 0; a < arity[p]; ++a) os << (a ? ", " : "") << "thing";
    os << ")\n";
  }
  for (int f = 0; f < n_facts; ++f) {
    int p = static_cast<int>(rng.index(n_preds));
    os << "P" << p << "(";
    for (int a = 0; a < arity[p]; ++a)
      os << (a ? ", " : "") << "C" << pad2(static_cast<int>(rng.index(n_entities)));
    os << ").\n";
  }
  return parse_facts(os.str());
}

Clause random_clause(const KnowledgeBase& kb, int max_literals, int max_free,
                     std::uint64_t seed) {
  Rng rng(seed);
  Clause c = make_head_clause(kb, RuleSource::ilp);
  const int n_lits = 1 + static_cast<int>(rng.index(max_literals));
  int n_free = 0;
  auto new_free = [&]() {
    int v = c.num_vars();
    c.var_names.push_back("v" + std::to_string(v));
    c.var_types.push_back(kUntyped);
    ++n_free;
    return v;
  };
  for (int l = 0; l < n_lits; ++l) {
    PredicateId p = static_cast<PredicateId>(rng.index(kb.schemas().size()));
    const PredicateSchema& s = kb.schema(p);
    Literal lit;
    lit.predicate = s.name;
    lit.inverse = s.arity() == 2 && rng.real() < 0.3;
    for (int a = 0; a < s.arity(); ++a) {
      double roll = rng.real();
      if (roll < 0.40) {
        lit.args.push_back(Term::variable(static_cast<int>(rng.index(2))));  // head var
      } else if (roll < 0.80) {
        if (n_free < max_free && (n_free == 0 || rng.real() < 0.5))
          lit.args.push_back(Term::variable(new_free()));
        else if (n_free > 0)
          lit.args.push_back(Term::variable(2 + static_cast<int>(rng.index(n_free))));
        else
          lit.args.push_back(Term::variable(static_cast<int>(rng.index(2))));
      } else {
        lit.args.push_back(Term::constant(
            kb.entity_symbol(static_cast<EntityId>(rng.index(kb.num_entities())))));
      }
    }
    c.body.push_back(std::move(lit));
  }
  return c.canonical();
}

std::string random_graph_facts(int n_nodes, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream os;
  os << "@schema Edge(node, node)\n";
  for (int i = 0; i < n_nodes; ++i)
    os << "Self(N" << pad2(i) << ").\n";  // unary: every node becomes an entity
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j)
      if (rng.real() < edge_prob) os << "Edge(N" << pad2(i) << ", N" << pad2(j) << ").\n";
  return os.str();
}

std::vector<std::vector<int>> floyd_warshall(const GaifmanGraph& g) {
  const int n = static_cast<int>(g.num_nodes());
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (EntityId a = 0; a < g.num_nodes(); ++a)
    for (EntityId b : g.neighbors(a)) d[a][b] = 1;
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][m] + d[m][j] < d[i][j]) d[i][j] = d[i][m] + d[m][j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d[i][j] >= inf) d[i][j] = -1;
  return d;
}

namespace {

struct GreedyWalker {
  const KnowledgeBase& kb;
  const RelationalTree& tree;
  double beta;
  double lambda;
  TreeGreedyCheck result;

  struct Entry {
    const LabeledTuple* tuple;
    SplitExample stats;
  };

  static bool sat(const KnowledgeBase& kb, const Clause& c, const LabeledTuple& t) {
    return has_grounding(partial_ground(c, t.args, kb), kb);
  }

  // Context vars = vars referenced by the head and all but the chosen
  // (last) body literal; extend_clause appends fresh vars at the end, so a
  // prefix truncation recovers the exact candidate space.
  static Clause rebuild_context(const Clause& test) {
    Clause ctx = test;
    ctx.body.pop_back();
    int used = -1;
    for (const Term& t : ctx.head.args) used = std::max(used, t.var);
    for (const Literal& l : ctx.body)
      for (const Term& t : l.args)
        if (t.is_var()) used = std::max(used, t.var);
    ctx.var_names.resize(used + 1);
    ctx.var_types.resize(used + 1);
    return ctx;
  }

  void walk(int node_id, std::vector<Entry> pool, const Clause& context, int depth) {
    const TreeNode& node = tree.nodes[node_id];
    if (node.leaf || pool.empty()) return;
    ++result.internal_nodes;

    std::vector<SplitExample> stats;
    for (const Entry& e : pool) stats.push_back(e.stats);

    std::vector<char> chosen_left(pool.size());
    std::vector<Entry> lp, rp;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      chosen_left[i] = sat(kb, node.test, *pool[i].tuple);
      (chosen_left[i] ? lp : rp).push_back(pool[i]);
    }
    double chosen_obj = split_objective(stats, chosen_left, beta, lambda, depth);
    if (chosen_obj >= leaf_objective(stats) - 1e-12) ++result.violations;

    Clause ctx = rebuild_context(node.test);
    for (const CandidateLiteral& cand : candidate_literals(kb, ctx.var_types, true, &ctx.body)) {
      Clause extended = extend_clause(ctx, cand);
      std::vector<char> left(pool.size());
      std::size_t n_left = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        left[i] = sat(kb, extended, *pool[i].tuple);
        n_left += left[i];
      }
      if (n_left == 0 || n_left == pool.size()) continue;
      ++result.candidates_scored;
      if (split_objective(stats, left, beta, lambda, depth) < chosen_obj - 1e-9)
        ++result.violations;
    }

    walk(node.left, std::move(lp), node.test, depth + 1);
    walk(node.right, std::move(rp), ctx, depth + 1);
  }
};

}  // namespace

TreeGreedyCheck verify_tree_greedy(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                                   const std::vector<LabeledTuple>& neg,
                                   const DistanceModel& model_so_far, double beta,
                                   const RelationalTree& tree) {
  GreedyWalker w{kb, tree, beta, model_so_far.lambda, {}};
  const std::size_t n_train =
      model_so_far.training_examples.empty() ? pos.size() : model_so_far.training_examples.size();
  const double alpha = n_train ? 1.0 / double(n_train) : 0.0;
  std::vector<GreedyWalker::Entry> pool;
  for (const LabeledTuple& t : pos)
    pool.push_back({&t, {0.0, density_estimate(model_so_far, t, kb), alpha}});
  for (const LabeledTuple& t : neg)
    pool.push_back({&t, {1.0, density_estimate(model_so_far, t, kb), 0.0}});
  if (!tree.nodes.empty()) w.walk(0, std::move(pool), make_head_clause(kb, RuleSource::relocc), 0);
  return w.result;
}

RelationalTree make_random_tree(const KnowledgeBase& kb, int max_depth, double lambda,
                                std::uint64_t seed) {
  Rng rng(seed);
  RelationalTree tree;
  tree.lambda = lambda;

  // Recursive growth; geometric stop keeps depths mixed.
  struct Grower {
    const KnowledgeBase& kb;
    Rng& rng;
    RelationalTree& tree;
    int max_depth;

    int grow(const Clause& context, int depth) {
      int id = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes[id].depth = depth;
      if (depth >= max_depth || rng.real() < 0.3) return id;
      auto cands = candidate_literals(kb, context.var_types, true, &context.body);
      if (cands.empty()) return id;
      Clause test = extend_clause(context, cands[rng.index(cands.size())]);
      tree.nodes[id].leaf = false;
      tree.nodes[id].test = test;
      int l = grow(test, depth + 1);
      int r = grow(context, depth + 1);
      tree.nodes[id].left = l;
      tree.nodes[id].right = r;
      return id;
    }
  };
  Grower g{kb, rng, tree, max_depth};
  g.grow(make_head_clause(kb, RuleSource::relocc), 0);
  return tree;
}

std::int64_t oracle_count(const Clause& clause, const std::vector<EntityId>& tuple,
                          const KnowledgeBase& kb, const NeighborhoodSample* members) {
  // Head binding with the same type gate as the production path.
  std::vector<std::int64_t> binding(clause.num_vars(), -1);
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (!type_compatible(kb.entity_type(tuple[i]), clause.var_types[clause.head.args[i].var]))
      return 0;
    binding[clause.head.args[i].var] = tuple[i];
  }
  std::vector<int> free;
  for (int v = 0; v < clause.num_vars(); ++v)
    if (binding[v] < 0) free.push_back(v);

  auto literal_holds = [&](const Literal& lit) {
    auto pid = kb.predicate_id(lit.predicate);
    if (!pid) return false;
    GroundAtom a;
    a.predicate = *pid;
    a.args.resize(lit.args.size());
    for (std::size_t j = 0; j < lit.args.size(); ++j) {
      std::size_t pos = lit.inverse ? lit.args.size() - 1 - j : j;
      const Term& t = lit.args[j];
      if (t.is_var()) {
        a.args[pos] = static_cast<EntityId>(binding[t.var]);
      } else {
        auto e = kb.entity_id(t.symbol);
        if (!e) return false;
        a.args[pos] = *e;
      }
    }
    return kb.has_fact(a);
  };

  std::int64_t count = 0;
  const std::size_t n = kb.num_entities();
  std::vector<std::size_t> cursor(free.size(), 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < free.size(); ++i) {
      binding[free[i]] = static_cast<std::int64_t>(cursor[i]);
      if (members && !members->contains(static_cast<EntityId>(cursor[i]))) ok = false;
    }
    if (ok) {
      for (const Literal& lit : clause.body)
        if (!(ok = literal_holds(lit))) break;
      count += ok;
    }
    if (free.empty()) break;
    std::size_t i = free.size();
    while (i > 0 && ++cursor[i - 1] == n) cursor[--i] = 0;
    if (i == 0) break;
  }
  return count;
}

}  // namespace testsup
