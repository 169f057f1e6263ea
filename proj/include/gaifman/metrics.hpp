#pragma once

#include <vector>

#include "gaifman/learn.hpp"

namespace gaifman {

struct Metrics {
  double accuracy = 0;
  double recall = 0;
  double f1 = 0;
  double auc_roc = 0;
  double auc_pr = 0;
};

// Mann-Whitney rank statistic; tied scores get average ranks. NaN when only
// one class is present.
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

// Area under the precision-recall curve with step interpolation; tied scores
// are processed as one threshold group. NaN without positives.
double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels);

// Threshold 0.5; recall and f1 are w.r.t. the positive class.
Metrics compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels);

enum class Aggregate { per_row, per_tuple_mean };

// Scores every row; under per_tuple_mean the w rows of each group are
// averaged into one prediction per query tuple before any thresholding.
Metrics evaluate(const Scorer& scorer, const Dataset& ds, Aggregate aggregate);

}  // namespace gaifman
