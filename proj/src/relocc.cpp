#include "gaifman/relocc.hpp"

#include <algorithm>
#include <cmath>

#include "gaifman/grounder.hpp"
#include "gaifman/ilp.hpp"

namespace gaifman {

std::vector<int> RelationalTree::route(const LabeledTuple& x, const KnowledgeBase& kb) const {
  std::vector<int> path;
  if (nodes.empty()) return path;
  int cur = 0;
  while (true) {
    path.push_back(cur);
    const TreeNode& n = nodes[cur];
    if (n.leaf) return path;
    bool sat = has_grounding(partial_ground(n.test, x.args, kb), kb);
    cur = sat ? n.left : n.right;
  }
}

double tree_distance(const RelationalTree& tree, const LabeledTuple& x1, const LabeledTuple& x2,
                     const KnowledgeBase& kb) {
  std::vector<int> p1 = tree.route(x1, kb);
  std::vector<int> p2 = tree.route(x2, kb);
  std::size_t i = 0;
  while (i < p1.size() && i < p2.size() && p1[i] == p2[i]) ++i;
  if (i == p1.size() && i == p2.size()) return 0.0;  // same leaf
  // Paths share nodes [0, i); the divergence node is the LCA, at depth i-1.
  return std::exp(-tree.lambda * static_cast<double>(i - 1));
}

double combined_distance(const DistanceModel& model, const LabeledTuple& x1,
                         const LabeledTuple& x2, const KnowledgeBase& kb) {
  if (model.trees.empty())
    throw std::invalid_argument("combined_distance: model has no trees");
  double d = 0;
  for (std::size_t i = 0; i < model.trees.size(); ++i)
    d += model.betas[i] * tree_distance(model.trees[i], x1, x2, kb);
  return d;
}

double density_estimate(const DistanceModel& model, const LabeledTuple& z,
                        const KnowledgeBase& kb) {
  if (model.trees.empty() || model.training_examples.empty()) return 0.0;
  double e = 0;
  for (std::size_t j = 0; j < model.training_examples.size(); ++j)
    e += model.alphas[j] * combined_distance(model, model.training_examples[j], z, kb);
  return e;
}

double split_objective(const std::vector<SplitExample>& pool, const std::vector<char>& goes_left,
                       double beta, double lambda, int depth) {
  double mass_left = 0, mass_right = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    (goes_left[i] ? mass_left : mass_right) += pool[i].alpha;
  const double scale = beta * std::exp(-lambda * static_cast<double>(depth));
  double obj = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double opposite = goes_left[i] ? mass_right : mass_left;
    double term = pool[i].indicator - pool[i].density - scale * opposite;
    obj += term * term;
  }
  return obj;
}

double leaf_objective(const std::vector<SplitExample>& pool) {
  double obj = 0;
  for (const SplitExample& e : pool) {
    double term = e.indicator - e.density;
    obj += term * term;
  }
  return obj;
}

namespace {

struct PoolEntry {
  const LabeledTuple* tuple;
  SplitExample stats;
};

struct TreeBuilder {
  const KnowledgeBase& kb;
  double beta;
  double lambda;
  int max_depth;
  RelationalTree tree;

  int build(std::vector<PoolEntry> pool, const Clause& context, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].depth = depth;
    if (depth >= max_depth || pool.empty()) return id;

    std::vector<SplitExample> stats;
    stats.reserve(pool.size());
    for (const PoolEntry& p : pool) stats.push_back(p.stats);
    const double baseline = leaf_objective(stats);

    double best_obj = 0;
    Clause best_clause;
    std::string best_serial;
    std::vector<char> best_left;
    bool have_best = false;

    for (const CandidateLiteral& cand :
         candidate_literals(kb, context.var_types, true, &context.body)) {
      Clause extended = extend_clause(context, cand);
      std::vector<char> left(pool.size());
      std::size_t n_left = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        left[i] = has_grounding(partial_ground(extended, pool[i].tuple->args, kb), kb);
        n_left += left[i];
      }
      if (n_left == 0 || n_left == pool.size()) continue;  // degenerate
      double obj = split_objective(stats, left, beta, lambda, depth);
      if (obj >= baseline - 1e-12) continue;  // must improve on not splitting
      std::string serial = extended.canonical().serialize();
      if (!have_best || obj < best_obj - 1e-12 ||
          (std::abs(obj - best_obj) <= 1e-12 && serial < best_serial)) {
        best_obj = obj;
        best_clause = std::move(extended);
        best_serial = std::move(serial);
        best_left = std::move(left);
        have_best = true;
      }
    }
    if (!have_best) return id;

    std::vector<PoolEntry> lp, rp;
    for (std::size_t i = 0; i < pool.size(); ++i)
      (best_left[i] ? lp : rp).push_back(pool[i]);

    tree.nodes[id].leaf = false;
    tree.nodes[id].test = best_clause;
    int l = build(std::move(lp), best_clause, depth + 1);
    int r = build(std::move(rp), context, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

}  // namespace

RelationalTree learn_tree(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                          const std::vector<LabeledTuple>& neg, const DistanceModel& model_so_far,
                          double beta_current, int max_depth) {
  if (max_depth < 0) throw std::invalid_argument("learn_tree: max_depth must be >= 0");
  const std::size_t n_train = model_so_far.training_examples.empty()
                                  ? pos.size()
                                  : model_so_far.training_examples.size();
  const double alpha = n_train ? 1.0 / static_cast<double>(n_train) : 0.0;

  std::vector<PoolEntry> pool;
  pool.reserve(pos.size() + neg.size());
  for (const LabeledTuple& t : pos)
    pool.push_back({&t, {0.0, density_estimate(model_so_far, t, kb), alpha}});
  for (const LabeledTuple& t : neg)
    pool.push_back({&t, {1.0, density_estimate(model_so_far, t, kb), 0.0}});

  TreeBuilder b{kb, beta_current, model_so_far.lambda, max_depth, {}};
  b.tree.lambda = model_so_far.lambda;
  b.build(std::move(pool), make_head_clause(kb, RuleSource::relocc), 0);
  return b.tree;
}

Clause left_path_clause(const RelationalTree& tree, const KnowledgeBase& kb) {
  Clause c = make_head_clause(kb, RuleSource::relocc);
  if (tree.nodes.empty() || tree.nodes[0].leaf) return c;
  int cur = 0;
  const TreeNode* deepest = nullptr;
  while (!tree.nodes[cur].leaf) {
    deepest = &tree.nodes[cur];
    cur = tree.nodes[cur].left;
  }
  // The deepest internal node's test already carries the whole left-path
  // conjunction.
  Clause out = deepest->test;
  out.source = RuleSource::relocc;
  return out;
}

std::pair<DistanceModel, std::vector<Clause>> learn_distance_model(
    const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
    const std::vector<LabeledTuple>& neg, int n_trees, double lambda, int max_depth) {
  if (n_trees < 1) throw std::invalid_argument("learn_distance_model: n_trees must be >= 1");
  if (lambda <= 0) throw std::invalid_argument("learn_distance_model: lambda must be > 0");

  DistanceModel model;
  model.lambda = lambda;
  model.training_examples = pos;
  model.alphas.assign(pos.size(), pos.empty() ? 0.0 : 1.0 / static_cast<double>(pos.size()));

  std::vector<Clause> clauses;
  std::vector<LabeledTuple> remaining = pos;

  for (int i = 0; i < n_trees && !remaining.empty(); ++i) {
    double beta_cur = 1.0 / static_cast<double>(i + 1);
    RelationalTree tree = learn_tree(kb, remaining, neg, model, beta_cur, max_depth);
    Clause path = left_path_clause(tree, kb);

    model.trees.push_back(std::move(tree));
    model.betas.assign(model.trees.size(), 1.0 / static_cast<double>(model.trees.size()));

    if (path.body.empty()) {
      warn("learn_distance_model: single-leaf tree, dropping empty relational feature");
      break;
    }
    clauses.push_back(path.canonical());

    std::vector<LabeledTuple> still;
    for (const LabeledTuple& t : remaining)
      if (!covers(clauses.back(), t, kb)) still.push_back(t);
    if (still.size() == remaining.size()) break;  // no progress; further trees identical
    remaining = std::move(still);
  }
  return {std::move(model), std::move(clauses)};
}

}  // namespace gaifman
