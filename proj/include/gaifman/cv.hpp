#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaifman/clause.hpp"
#include "gaifman/kb.hpp"
#include "gaifman/metrics.hpp"

namespace gaifman {

enum class Method { rw, ilp, relocc };
enum class Classifier { lr, gb };

std::string to_string(Method m);
std::string to_string(Classifier c);
Method method_from_string(const std::string& s);
Classifier classifier_from_string(const std::string& s);

// Everything a pipeline run needs besides the KB itself.
struct PipelineParams {
  Method method = Method::relocc;
  Classifier classifier = Classifier::gb;
  int r = 1, k = 10, w = 5;
  double lambda = 1.0;
  double neg_ratio = 1.0;
  std::uint64_t seed = 0;
  int folds = 5;
  Aggregate aggregate = Aggregate::per_tuple_mean;
  int threads = 1;

  int rw_walks = 30;
  int rw_max_len = 4;

  int ilp_max_rules = 8;
  int ilp_max_len = 3;
  int ilp_beam = 10;
  int ilp_min_score = 1;

  int relocc_trees = 5;
  int relocc_max_depth = 3;

  double lr_rate = 0.1;
  int lr_epochs = 500;
  double lr_l2 = 1e-4;

  int gb_rounds = 100;
  int gb_depth = 3;
  double gb_shrinkage = 0.1;
};

// Dispatch to the configured rule learner over the given example pools.
std::vector<Clause> learn_rules(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                                const std::vector<LabeledTuple>& neg,
                                const PipelineParams& params);

// Train the configured classifier and wrap it as a row scorer.
Scorer train_classifier(const Dataset& ds, const PipelineParams& params);

struct CvResult {
  std::vector<Metrics> fold_metrics;
  Metrics mean;
  std::vector<std::size_t> rules_per_fold;
  double rules_seconds = 0;
  double embed_seconds = 0;
  double train_eval_seconds = 0;
};

// Seeded shuffle + round-robin deal of n items into folds; the tuple-level
// unit keeps all w neighborhood rows of a tuple in one fold.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

// Stratified cross-validation over query tuples: positives and negatives are
// dealt into folds independently via fold_assignment. Rule learning and
// training see only training-fold tuples.
CvResult cross_validate(const KnowledgeBase& kb, const PipelineParams& params);

Metrics mean_metrics(const std::vector<Metrics>& folds);

}  // namespace gaifman
