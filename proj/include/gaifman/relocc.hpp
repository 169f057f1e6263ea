#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gaifman/clause.hpp"
#include "gaifman/kb.hpp"

namespace gaifman {

// Relational one-class classification: an ensemble of relational trees
// whose least-common-ancestor depths define a non-parametric distance over
// examples; the left-most root-to-leaf path of each tree doubles as a
// relational feature clause.

struct TreeNode {
  bool leaf = true;
  // Conjunction of the true-branch tests from the root down to and
  // including this node's own literal; routing an example evaluates this
  // whole clause existentially. Unused for leaves.
  Clause test;
  int left = -1;
  int right = -1;
  int depth = 0;
};

struct RelationalTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double lambda = 1.0;

  // Node ids visited from root to leaf; path[i] has depth i.
  std::vector<int> route(const LabeledTuple& x, const KnowledgeBase& kb) const;
};

// 0 when both examples reach the same leaf, else e^(-lambda * depth(LCA)).
double tree_distance(const RelationalTree& tree, const LabeledTuple& x1, const LabeledTuple& x2,
                     const KnowledgeBase& kb);

struct DistanceModel {
  std::vector<RelationalTree> trees;
  std::vector<double> betas;   // per tree, uniform, sums to 1
  std::vector<LabeledTuple> training_examples;
  std::vector<double> alphas;  // per training example, uniform, sums to 1
  double lambda = 1.0;
};

// sum_i beta_i * d_i(x1, x2); error on an empty ensemble.
double combined_distance(const DistanceModel& model, const LabeledTuple& x1,
                         const LabeledTuple& x2, const KnowledgeBase& kb);

// E(z not in class) = sum_j alpha_j * D(x_j, z). An empty ensemble scores 0
// (the bootstrap state while the first tree is being grown).
double density_estimate(const DistanceModel& model, const LabeledTuple& z,
                        const KnowledgeBase& kb);

// One pooled example during split scoring: indicator is 1 for unlabeled
// (negative-pool) examples and 0 for positives, density is the model-so-far
// estimate E(z), alpha is the example's training weight (0 when unlabeled).
struct SplitExample {
  double indicator = 0;
  double density = 0;
  double alpha = 0;
};

// Two-branch squared error of a candidate split at `depth`: each side's
// examples are scored against the opposite side's distance mass
// beta * e^(-lambda*depth) * sum(alpha). Exposed so exhaustive verification
// can re-score every candidate.
double split_objective(const std::vector<SplitExample>& pool, const std::vector<char>& goes_left,
                       double beta, double lambda, int depth);

// Squared error when the node keeps its pool unsplit; splits must beat this.
double leaf_objective(const std::vector<SplitExample>& pool);

// Greedy top-down growth: at each node pick the literal test minimizing
// split_objective, stopping at max_depth or when no non-degenerate test
// improves on leaf_objective. beta_current is the weight the tree will take
// in the ensemble.
RelationalTree learn_tree(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                          const std::vector<LabeledTuple>& neg, const DistanceModel& model_so_far,
                          double beta_current, int max_depth);

// The conjunction along the tree's left-most path as a clause; empty body
// for a single-leaf tree.
Clause left_path_clause(const RelationalTree& tree, const KnowledgeBase& kb);

// Learns up to n_trees trees, each on the positives not yet covered by an
// extracted left-path clause, then sets uniform betas and alphas. Empty-body
// extractions are dropped with a warning and stop the iteration.
std::pair<DistanceModel, std::vector<Clause>> learn_distance_model(
    const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
    const std::vector<LabeledTuple>& neg, int n_trees, double lambda, int max_depth);

}  // namespace gaifman
