#include "gaifman/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace gaifman {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::size_t n_pos = std::count(labels.begin(), labels.end(), 1);
  std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    warn("auc_roc: single-class inputs, AUC undefined");
    return kNaN;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Average ranks over tie groups, 1-based.
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg = 0.5 * double(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double rank_sum = 0;
  for (std::size_t r = 0; r < n; ++r)
    if (labels[r] == 1) rank_sum += rank[r];
  double u = rank_sum - double(n_pos) * double(n_pos + 1) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::size_t n_pos = std::count(labels.begin(), labels.end(), 1);
  if (n_pos == 0) {
    warn("auc_pr: no positives, AUC-PR undefined");
    return kNaN;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double area = 0, tp = 0, fp = 0, prev_recall = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k)
      (labels[order[k]] == 1 ? tp : fp) += 1.0;
    double recall = tp / double(n_pos);
    double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return area;
}

Metrics compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels) {
  Metrics m;
  const std::size_t n = scores.size();
  if (n == 0) throw std::invalid_argument("compute_metrics: empty inputs");
  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool pred = scores[i] >= 0.5;
    if (labels[i] == 1)
      (pred ? tp : fn) += 1.0;
    else
      (pred ? fp : tn) += 1.0;
  }
  m.accuracy = (tp + tn) / double(n);
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.f1 = precision + m.recall > 0 ? 2.0 * precision * m.recall / (precision + m.recall) : 0.0;
  m.auc_roc = auc_roc(scores, labels);
  m.auc_pr = auc_pr(scores, labels);
  return m;
}

Metrics evaluate(const Scorer& scorer, const Dataset& ds, Aggregate aggregate) {
  if (ds.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  std::vector<double> scores;
  std::vector<int> labels;
  if (aggregate == Aggregate::per_row) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      scores.push_back(scorer(ds.x[i]));
      labels.push_back(ds.y[i]);
    }
  } else {
    // Mean of the w row scores per query tuple; insertion order kept stable.
    std::map<std::string, std::pair<double, int>> acc;  // sum, count
    std::map<std::string, int> label_of;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::string& gkey = ds.group[i];
      if (!acc.count(gkey)) order.push_back(gkey);
      auto& a = acc[gkey];
      a.first += scorer(ds.x[i]);
      a.second += 1;
      label_of[gkey] = ds.y[i];
    }
    for (const std::string& gkey : order) {
      scores.push_back(acc[gkey].first / double(acc[gkey].second));
      labels.push_back(label_of[gkey]);
    }
  }
  return compute_metrics(scores, labels);
}

}  // namespace gaifman
