#include "gaifman/cv.hpp"

#include <algorithm>
#include <chrono>

#include "gaifman/grounder.hpp"
#include "gaifman/ilp.hpp"
#include "gaifman/relocc.hpp"
#include "gaifman/walks.hpp"

namespace gaifman {

std::string to_string(Method m) {
  switch (m) {
    case Method::rw: return "rw";
    case Method::ilp: return "ilp";
    default: return "relocc";
  }
}

std::string to_string(Classifier c) { return c == Classifier::lr ? "lr" : "gb"; }

Method method_from_string(const std::string& s) {
  if (s == "rw") return Method::rw;
  if (s == "ilp") return Method::ilp;
  if (s == "relocc") return Method::relocc;
  throw ConfigError("unknown method '" + s + "' (expected rw|ilp|relocc)");
}

Classifier classifier_from_string(const std::string& s) {
  if (s == "lr") return Classifier::lr;
  if (s == "gb") return Classifier::gb;
  throw ConfigError("unknown classifier '" + s + "' (expected lr|gb)");
}

std::vector<Clause> learn_rules(const KnowledgeBase& kb, const std::vector<LabeledTuple>& pos,
                                const std::vector<LabeledTuple>& neg,
                                const PipelineParams& p) {
  switch (p.method) {
    case Method::rw: {
      SchemaGraph sg = SchemaGraph::build(kb);
      return sample_walks(sg, kb, p.rw_max_len, p.rw_walks, p.seed);
    }
    case Method::ilp: {
      IlpOptions opt{p.ilp_max_rules, p.ilp_max_len, p.ilp_beam, p.ilp_min_score};
      return learn_clauses(kb, pos, neg, opt);
    }
    default: {
      auto [model, clauses] =
          learn_distance_model(kb, pos, neg, p.relocc_trees, p.lambda, p.relocc_max_depth);
      return clauses;
    }
  }
}

Scorer train_classifier(const Dataset& ds, const PipelineParams& p) {
  if (p.classifier == Classifier::lr) {
    LinearModel m = train_logistic(ds, p.lr_rate, p.lr_epochs, p.lr_l2, p.seed);
    return [m](const std::vector<double>& x) { return m.predict(x); };
  }
  GbtModel m = train_gbt(ds, p.gb_rounds, p.gb_depth, p.gb_shrinkage, p.seed);
  return [m](const std::vector<double>& x) { return m.predict(x); };
}

Metrics mean_metrics(const std::vector<Metrics>& folds) {
  Metrics m;
  if (folds.empty()) return m;
  for (const Metrics& f : folds) {
    m.accuracy += f.accuracy;
    m.recall += f.recall;
    m.f1 += f.f1;
    m.auc_roc += f.auc_roc;
    m.auc_pr += f.auc_pr;
  }
  double n = double(folds.size());
  m.accuracy /= n;
  m.recall /= n;
  m.f1 /= n;
  m.auc_roc /= n;
  m.auc_pr /= n;
  return m;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t j = i + rng.index(n - i);
    std::swap(order[i], order[j]);
  }
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % folds);
  return fold;
}

CvResult cross_validate(const KnowledgeBase& kb, const PipelineParams& p) {
  if (p.folds < 2) throw ConfigError("cross_validate: folds must be >= 2");
  std::vector<LabeledTuple> pos = positive_tuples(kb);
  std::vector<LabeledTuple> neg = generate_negatives(kb, p.neg_ratio, p.seed);
  if (pos.size() < static_cast<std::size_t>(p.folds))
    throw ConfigError("cross_validate: fewer positive tuples (" + std::to_string(pos.size()) +
                      ") than folds (" + std::to_string(p.folds) + ")");

  Rng rng(mix_seed(p.seed, 0x666f6c64));  // independent fold-assignment stream
  std::vector<int> pos_fold = deal_folds(pos.size(), p.folds, rng);
  std::vector<int> neg_fold = deal_folds(neg.size(), p.folds, rng);

  CvResult result;
  for (int f = 0; f < p.folds; ++f) {
    std::vector<LabeledTuple> pos_train, pos_test, neg_train, neg_test;
    for (std::size_t i = 0; i < pos.size(); ++i)
      (pos_fold[i] == f ? pos_test : pos_train).push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i)
      (neg_fold[i] == f ? neg_test : neg_train).push_back(neg[i]);

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Clause> rules = learn_rules(kb, pos_train, neg_train, p);
    result.rules_seconds += seconds_since(t0);
    result.rules_per_fold.push_back(rules.size());
    if (rules.empty())
      throw ConfigError("cross_validate: no rules learned on fold " + std::to_string(f));

    t0 = std::chrono::steady_clock::now();
    auto train_rows = embed_tuples(kb, rules, pos_train, neg_train, p.r, p.k, p.w, p.seed,
                                   p.threads);
    auto test_rows = embed_tuples(kb, rules, pos_test, neg_test, p.r, p.k, p.w, p.seed,
                                  p.threads);
    result.embed_seconds += seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    Dataset train_ds = dataset_from_rows(kb, train_rows, rules.size());
    Dataset test_ds = dataset_from_rows(kb, test_rows, rules.size());
    Scorer scorer = train_classifier(train_ds, p);
    result.fold_metrics.push_back(evaluate(scorer, test_ds, p.aggregate));
    result.train_eval_seconds += seconds_since(t0);
  }
  result.mean = mean_metrics(result.fold_metrics);
  return result;
}

}  // namespace gaifman
