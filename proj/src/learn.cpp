#include "gaifman/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace gaifman {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamped_log_odds(double p) {
  p = std::clamp(p, 1e-9, 1.0 - 1e-9);
  return std::log(p / (1.0 - p));
}

}  // namespace

Dataset dataset_from_rows(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows,
                          std::size_t num_features) {
  Dataset ds;
  ds.feature_dim = num_features;
  for (const EmbeddingRow& r : rows) {
    std::vector<double> f(r.counts.begin(), r.counts.end());
    f.resize(num_features, 0.0);
    ds.x.push_back(std::move(f));
    ds.y.push_back(r.positive ? 1 : 0);
    std::string key;
    for (std::size_t i = 0; i < r.tuple.size(); ++i) {
      if (i) key += '|';
      key += kb.entity_symbol(r.tuple[i]);
    }
    ds.group.push_back(std::move(key));
  }
  return ds;
}

Dataset load_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file: " + path);
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file: " + path);
  std::size_t cols = std::count(line.begin(), line.end(), ',') + 1;
  if (cols < 3 || line.rfind("tuple,neighborhood,label", 0) != 0)
    throw ParseError("bad embedding header: " + line);
  ds.feature_dim = cols - 3;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != cols)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " columns");
    ds.group.push_back(cells[0]);
    ds.y.push_back(std::stoi(cells[2]));
    std::vector<double> f;
    for (std::size_t i = 3; i < cells.size(); ++i) f.push_back(std::stod(cells[i]));
    ds.x.push_back(std::move(f));
  }
  return ds;
}

double LinearModel::predict(const std::vector<double>& features) const {
  double z = b;
  for (std::size_t j = 0; j < w.size() && j < features.size(); ++j) {
    double v = sigma[j] > 0 ? (features[j] - mu[j]) / sigma[j] : 0.0;
    z += w[j] * v;
  }
  return sigmoid(z);
}

double logistic_loss_grad(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2,
                          std::vector<double>* grad_w, double* grad_b) {
  const std::size_t n = x.size(), d = w.size();
  if (grad_w) grad_w->assign(d, 0.0);
  if (grad_b) *grad_b = 0.0;
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
    double p = sigmoid(z);
    double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
    loss += y[i] ? -std::log(pc) : -std::log(1.0 - pc);
    double err = p - y[i];
    if (grad_w)
      for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += err * x[i][j];
    if (grad_b) *grad_b += err;
  }
  loss /= double(n);
  if (grad_w)
    for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] = (*grad_w)[j] / double(n) + l2 * w[j];
  if (grad_b) *grad_b /= double(n);
  for (std::size_t j = 0; j < d; ++j) loss += 0.5 * l2 * w[j] * w[j];
  return loss;
}

LinearModel train_logistic(const Dataset& ds, double lr, int epochs, double l2,
                           std::uint64_t seed) {
  (void)seed;  // zero init; seed kept for interface stability
  if (ds.size() == 0) throw std::invalid_argument("train_logistic: empty dataset");
  const std::size_t n = ds.size(), d = ds.feature_dim;

  LinearModel m;
  m.mu.assign(d, 0.0);
  m.sigma.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += ds.x[i][j];
    m.mu[j] = s / double(n);
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double delta = ds.x[i][j] - m.mu[j];
      v += delta * delta;
    }
    m.sigma[j] = std::sqrt(v / double(n));
  }

  double mean_y = std::accumulate(ds.y.begin(), ds.y.end(), 0.0) / double(n);
  if (mean_y == 0.0 || mean_y == 1.0) {
    warn("train_logistic: single-class training set, returning prior model");
    m.degenerate = true;
    m.w.assign(d, 0.0);
    m.b = clamped_log_odds(mean_y);
    return m;
  }

  std::vector<std::vector<double>> xs(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      xs[i][j] = m.sigma[j] > 0 ? (ds.x[i][j] - m.mu[j]) / m.sigma[j] : 0.0;

  m.w.assign(d, 0.0);
  m.b = 0.0;
  std::vector<double> gw;
  double gb;
  for (int e = 0; e < epochs; ++e) {
    logistic_loss_grad(xs, ds.y, m.w, m.b, l2, &gw, &gb);
    for (std::size_t j = 0; j < d; ++j) m.w[j] -= lr * gw[j];
    m.b -= lr * gb;
  }
  return m;
}

double RegTree::predict(const std::vector<double>& features) const {
  int cur = 0;
  while (nodes[cur].feature >= 0)
    cur = features[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                               : nodes[cur].right;
  return nodes[cur].value;
}

double GbtModel::raw_score(const std::vector<double>& features) const {
  double z = f0;
  for (const RegTree& t : trees) z += shrinkage * t.predict(features);
  return z;
}

double GbtModel::predict(const std::vector<double>& features) const {
  return sigmoid(raw_score(features));
}

namespace {

// Newton-step regression tree on gradients g with hessians h.
struct GbtTreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& g;
  const std::vector<double>& h;
  int max_depth;
  RegTree tree;

  static constexpr double kEps = 1e-9;

  int build(std::vector<std::size_t> idx, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    double gs = 0, hs = 0;
    for (std::size_t i : idx) {
      gs += g[i];
      hs += h[i];
    }
    tree.nodes[id].value = gs / (hs + kEps);
    if (depth >= max_depth || idx.size() < 2) return id;

    const double parent_gain = gs * gs / (hs + kEps);
    double best_gain = 0;
    int best_f = -1;
    double best_thr = 0;
    const std::size_t d = x.empty() ? 0 : x[0].size();

    for (std::size_t f = 0; f < d; ++f) {
      std::vector<std::size_t> order = idx;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
        return a < b;
      });
      double gl = 0, hl = 0;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        gl += g[order[p]];
        hl += h[order[p]];
        if (x[order[p]][f] == x[order[p + 1]][f]) continue;
        double gr = gs - gl, hr = hs - hl;
        double gain = gl * gl / (hl + kEps) + gr * gr / (hr + kEps) - parent_gain;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_thr = 0.5 * (x[order[p]][f] + x[order[p + 1]][f]);
        }
      }
    }
    if (best_f < 0) return id;

    std::vector<std::size_t> li, ri;
    for (std::size_t i : idx) (x[i][best_f] <= best_thr ? li : ri).push_back(i);
    tree.nodes[id].feature = best_f;
    tree.nodes[id].threshold = best_thr;
    int l = build(std::move(li), depth + 1);
    int r = build(std::move(ri), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

}  // namespace

GbtModel train_gbt(const Dataset& ds, int n_rounds, int depth, double shrinkage,
                   std::uint64_t seed) {
  (void)seed;  // no subsampling; deterministic by construction
  if (ds.size() == 0) throw std::invalid_argument("train_gbt: empty dataset");
  if (n_rounds < 0 || depth < 1) throw std::invalid_argument("train_gbt: bad parameters");

  const std::size_t n = ds.size();
  double mean_y = std::accumulate(ds.y.begin(), ds.y.end(), 0.0) / double(n);

  GbtModel m;
  m.shrinkage = shrinkage;
  m.f0 = clamped_log_odds(mean_y);
  if (mean_y == 0.0 || mean_y == 1.0) {
    warn("train_gbt: single-class training set, returning prior model");
    m.degenerate = true;
    return m;
  }
  if (shrinkage == 0.0) return m;  // rounds cannot change the score

  std::vector<double> score(n, m.f0), g(n), h(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int round = 0; round < n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(score[i]);
      g[i] = ds.y[i] - p;
      h[i] = std::max(p * (1.0 - p), 1e-12);
    }
    GbtTreeBuilder b{ds.x, g, h, depth, {}};
    b.build(all, 0);
    for (std::size_t i = 0; i < n; ++i) score[i] += shrinkage * b.tree.predict(ds.x[i]);
    m.trees.push_back(std::move(b.tree));
  }
  return m;
}

std::string linear_model_json(const LinearModel& m) {
  nlohmann::json j;
  j["type"] = "logistic";
  j["w"] = m.w;
  j["b"] = m.b;
  j["mu"] = m.mu;
  j["sigma"] = m.sigma;
  j["degenerate"] = m.degenerate;
  return j.dump(2);
}

LinearModel linear_model_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  LinearModel m;
  m.w = j.at("w").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
  m.mu = j.at("mu").get<std::vector<double>>();
  m.sigma = j.at("sigma").get<std::vector<double>>();
  m.degenerate = j.value("degenerate", false);
  return m;
}

std::string gbt_model_json(const GbtModel& m) {
  nlohmann::json j;
  j["type"] = "gbt";
  j["f0"] = m.f0;
  j["shrinkage"] = m.shrinkage;
  j["degenerate"] = m.degenerate;
  nlohmann::json trees = nlohmann::json::array();
  for (const RegTree& t : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const RegTreeNode& n : t.nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value}});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump(2);
}

GbtModel gbt_model_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  GbtModel m;
  m.f0 = j.at("f0").get<double>();
  m.shrinkage = j.at("shrinkage").get<double>();
  m.degenerate = j.value("degenerate", false);
  for (const auto& jt : j.at("trees")) {
    RegTree t;
    for (const auto& jn : jt)
      t.nodes.push_back({jn.at("feature").get<int>(), jn.at("threshold").get<double>(),
                         jn.at("left").get<int>(), jn.at("right").get<int>(),
                         jn.at("value").get<double>()});
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace gaifman
