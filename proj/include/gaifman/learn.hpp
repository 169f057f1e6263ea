#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gaifman/grounder.hpp"

namespace gaifman {

// Propositionalized rows. group[i] identifies the originating query tuple so
// that its w neighborhood rows can be pooled (fold assignment, prediction
// aggregation).
struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // 1 positive, 0 negative
  std::vector<std::string> group;
  std::size_t feature_dim = 0;

  std::size_t size() const { return x.size(); }
};

Dataset dataset_from_rows(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows,
                          std::size_t num_features);
Dataset load_embedding_csv(const std::string& path);

struct LinearModel {
  std::vector<double> w;
  double b = 0;
  std::vector<double> mu, sigma;  // per-column standardization
  bool degenerate = false;        // single-class training set

  double predict(const std::vector<double>& features) const;
};

// Full-batch gradient descent on L2-regularized cross-entropy over z-scored
// features (constant columns map to 0).
LinearModel train_logistic(const Dataset& ds, double lr, int epochs, double l2,
                           std::uint64_t seed);

// Mean cross-entropy + (l2/2)|w|^2 over the given matrix; fills the exact
// gradient. Kept separate so finite-difference checks can call it directly.
double logistic_loss_grad(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2,
                          std::vector<double>* grad_w, double* grad_b);

struct RegTreeNode {
  int feature = -1;  // -1 = leaf
  double threshold = 0;
  int left = -1, right = -1;
  double value = 0;
};

struct RegTree {
  std::vector<RegTreeNode> nodes;
  double predict(const std::vector<double>& features) const;
};

struct GbtModel {
  double f0 = 0;  // prior log-odds
  double shrinkage = 0.1;
  std::vector<RegTree> trees;
  bool degenerate = false;

  double raw_score(const std::vector<double>& features) const;
  double predict(const std::vector<double>& features) const;  // probability
};

// Gradient boosting with logistic loss: each round fits an axis-aligned
// regression tree to the residuals y - p, leaf values take a Newton step.
GbtModel train_gbt(const Dataset& ds, int n_rounds, int depth, double shrinkage,
                   std::uint64_t seed);

using Scorer = std::function<double(const std::vector<double>&)>;

std::string linear_model_json(const LinearModel& m);
LinearModel linear_model_from_json(const std::string& text);
std::string gbt_model_json(const GbtModel& m);
GbtModel gbt_model_from_json(const std::string& text);

}  // namespace gaifman
