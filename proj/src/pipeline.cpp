#include "gaifman/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gaifman/graph.hpp"
#include "gaifman/grounder.hpp"
#include "gaifman/walks.hpp"

namespace fs = std::filesystem;

namespace gaifman {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hash_hex(const std::string& content) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv:%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  return buf;
}

nlohmann::json params_json(const PipelineParams& p) {
  nlohmann::json j;
  j["method"] = to_string(p.method);
  j["classifier"] = to_string(p.classifier);
  j["r"] = p.r;
  j["k"] = p.k;
  j["w"] = p.w;
  j["lambda"] = p.lambda;
  j["neg_ratio"] = p.neg_ratio;
  j["seed"] = p.seed;
  j["folds"] = p.folds;
  j["aggregate"] = p.aggregate == Aggregate::per_row ? "per_row" : "per_tuple_mean";
  j["threads"] = p.threads;
  j["rw_walks"] = p.rw_walks;
  j["rw_max_len"] = p.rw_max_len;
  j["ilp_max_rules"] = p.ilp_max_rules;
  j["ilp_max_len"] = p.ilp_max_len;
  j["ilp_beam"] = p.ilp_beam;
  j["ilp_min_score"] = p.ilp_min_score;
  j["relocc_trees"] = p.relocc_trees;
  j["relocc_max_depth"] = p.relocc_max_depth;
  j["lr_rate"] = p.lr_rate;
  j["lr_epochs"] = p.lr_epochs;
  j["lr_l2"] = p.lr_l2;
  j["gb_rounds"] = p.gb_rounds;
  j["gb_depth"] = p.gb_depth;
  j["gb_shrinkage"] = p.gb_shrinkage;
  return j;
}

// Tracks a stage's outputs so a failure never leaves partial artifacts, and
// writes the reproducibility manifest on success.
class Stage {
 public:
  Stage(std::string name, const PipelineConfig& cfg) : name_(std::move(name)), cfg_(cfg) {
    fs::create_directories(cfg_.output_dir);
    t0_ = std::chrono::steady_clock::now();
  }

  ~Stage() {
    if (!committed_)
      for (const auto& p : written_) {
        std::error_code ec;
        fs::remove(p, ec);
      }
  }

  std::string path(const std::string& file) const {
    return (fs::path(cfg_.output_dir) / file).string();
  }

  void input(const std::string& label, const std::string& content) {
    inputs_[label] = hash_hex(content);
  }

  void write(const std::string& file, const std::string& content) {
    std::string p = path(file);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError(name_ + ": cannot write " + p);
    out << content;
    out.close();
    written_.push_back(p);
    outputs_[file] = hash_hex(content);
  }

  void commit() {
    nlohmann::json j;
    j["stage"] = name_;
    j["facts"] = cfg_.facts_path;
    if (!cfg_.target.empty()) j["target"] = cfg_.target;
    j["params"] = params_json(cfg_.params);
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::ofstream out(path(name_ + ".manifest.json"), std::ios::binary);
    out << j.dump(2) << "\n";
    committed_ = true;
  }

 private:
  std::string name_;
  const PipelineConfig& cfg_;
  std::vector<std::string> written_;
  std::map<std::string, std::string> inputs_, outputs_;
  std::chrono::steady_clock::time_point t0_;
  bool committed_ = false;
};

std::string fmt_metric(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

nlohmann::json metrics_json_obj(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["auc_roc"] = m.auc_roc;
  j["auc_pr"] = m.auc_pr;
  return j;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  PipelineParams& p = cfg.params;
  try {
    if (key == "facts") cfg.facts_path = value;
    else if (key == "target") cfg.target = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "method") p.method = method_from_string(value);
    else if (key == "classifier") p.classifier = classifier_from_string(value);
    else if (key == "r") p.r = std::stoi(value);
    else if (key == "k") p.k = std::stoi(value);
    else if (key == "w") p.w = std::stoi(value);
    else if (key == "lambda") p.lambda = std::stod(value);
    else if (key == "neg_ratio") p.neg_ratio = std::stod(value);
    else if (key == "seed") p.seed = std::stoull(value);
    else if (key == "folds") p.folds = std::stoi(value);
    else if (key == "threads") p.threads = std::stoi(value);
    else if (key == "aggregate")
      p.aggregate = value == "per_row" ? Aggregate::per_row : Aggregate::per_tuple_mean;
    else if (key == "rw_walks") p.rw_walks = std::stoi(value);
    else if (key == "rw_max_len") p.rw_max_len = std::stoi(value);
    else if (key == "ilp_max_rules") p.ilp_max_rules = std::stoi(value);
    else if (key == "ilp_max_len") p.ilp_max_len = std::stoi(value);
    else if (key == "ilp_beam") p.ilp_beam = std::stoi(value);
    else if (key == "ilp_min_score") p.ilp_min_score = std::stoi(value);
    else if (key == "relocc_trees") p.relocc_trees = std::stoi(value);
    else if (key == "relocc_max_depth") p.relocc_max_depth = std::stoi(value);
    else if (key == "lr_rate") p.lr_rate = std::stod(value);
    else if (key == "lr_epochs") p.lr_epochs = std::stoi(value);
    else if (key == "lr_l2") p.lr_l2 = std::stod(value);
    else if (key == "gb_rounds") p.gb_rounds = std::stoi(value);
    else if (key == "gb_depth") p.gb_depth = std::stoi(value);
    else if (key == "gb_shrinkage") p.gb_shrinkage = std::stod(value);
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
  }
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig cfg;
  std::istringstream is(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto pos = line.find_first_of("%#"); pos != std::string::npos) line.resize(pos);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

KnowledgeBase load_kb(const PipelineConfig& cfg) {
  if (cfg.facts_path.empty()) throw ConfigError("no fact file configured (key 'facts')");
  std::string text = read_file(cfg.facts_path);
  if (!cfg.target.empty()) text += "\n@target " + cfg.target + "\n";
  return parse_facts(text);
}

void run_graph_stage(const PipelineConfig& cfg) {
  Stage st("graph", cfg);
  std::string facts = read_file(cfg.facts_path);
  st.input("facts", facts);
  KnowledgeBase kb = load_kb(cfg);
  GaifmanGraph g = GaifmanGraph::build(kb, kb.has_target());

  st.write("graph_edges.tsv", g.edge_list(kb));

  std::ostringstream stats;
  stats << "nodes " << g.num_nodes() << "\n";
  stats << "edges " << g.num_edges() << "\n";
  auto hist = g.degree_histogram();
  for (std::size_t d = 0; d < hist.size(); ++d)
    if (hist[d]) stats << "degree " << d << " " << hist[d] << "\n";
  st.write("graph_stats.txt", stats.str());
  st.commit();
  std::cout << "graph: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges\n";
}

void run_rules_stage(const PipelineConfig& cfg) {
  Stage st("rules", cfg);
  std::string facts = read_file(cfg.facts_path);
  st.input("facts", facts);
  KnowledgeBase kb = load_kb(cfg);
  auto pos = positive_tuples(kb);
  auto neg = generate_negatives(kb, cfg.params.neg_ratio, cfg.params.seed);
  auto rules = learn_rules(kb, pos, neg, cfg.params);
  if (rules.empty()) warn("rules: no rules learned");
  std::string text = "% method: " + to_string(cfg.params.method) + "\n";
  text += serialize_clauses(rules);
  st.write("rules.txt", text);
  st.commit();
  std::cout << "rules: " << rules.size() << " clauses (" << to_string(cfg.params.method)
            << ")\n";
}

void run_embed_stage(const PipelineConfig& cfg) {
  Stage st("embed", cfg);
  std::string facts = read_file(cfg.facts_path);
  st.input("facts", facts);
  KnowledgeBase kb = load_kb(cfg);
  std::string rules_text = read_file(st.path("rules.txt"));
  st.input("rules", rules_text);
  auto rules = parse_clauses(rules_text, kb);
  auto pos = positive_tuples(kb);
  auto neg = generate_negatives(kb, cfg.params.neg_ratio, cfg.params.seed);
  auto rows = embed_tuples(kb, rules, pos, neg, cfg.params.r, cfg.params.k, cfg.params.w,
                           cfg.params.seed, cfg.params.threads);
  st.write("embeddings.csv", embedding_csv(kb, rows, rules.size()));
  st.write("embeddings.jsonl", embedding_jsonl(kb, rows));
  st.commit();
  std::cout << "embed: " << rows.size() << " rows x " << rules.size() << " features\n";
}

void run_train_stage(const PipelineConfig& cfg) {
  Stage st("train", cfg);
  std::string csv = read_file(st.path("embeddings.csv"));
  st.input("embeddings", csv);
  Dataset ds = load_embedding_csv(st.path("embeddings.csv"));
  const PipelineParams& p = cfg.params;
  std::string model;
  if (p.classifier == Classifier::lr)
    model = linear_model_json(train_logistic(ds, p.lr_rate, p.lr_epochs, p.lr_l2, p.seed));
  else
    model = gbt_model_json(train_gbt(ds, p.gb_rounds, p.gb_depth, p.gb_shrinkage, p.seed));
  st.write("model.json", model + "\n");
  st.commit();
  std::cout << "train: " << to_string(p.classifier) << " model on " << ds.size() << " rows\n";
}

std::string metrics_csv(const std::vector<Metrics>& folds, const Metrics& mean,
                        const PipelineParams& params) {
  std::ostringstream os;
  os << "fold,method,classifier,accuracy,recall,f1,auc_roc,auc_pr\n";
  auto row = [&](const std::string& name, const Metrics& m) {
    os << name << ',' << to_string(params.method) << ',' << to_string(params.classifier) << ','
       << fmt_metric(m.accuracy) << ',' << fmt_metric(m.recall) << ',' << fmt_metric(m.f1)
       << ',' << fmt_metric(m.auc_roc) << ',' << fmt_metric(m.auc_pr) << "\n";
  };
  for (std::size_t f = 0; f < folds.size(); ++f) row(std::to_string(f), folds[f]);
  row("mean", mean);
  return os.str();
}

void run_eval_stage(const PipelineConfig& cfg) {
  Stage st("eval", cfg);
  std::string csv = read_file(st.path("embeddings.csv"));
  std::string model_text = read_file(st.path("model.json"));
  st.input("embeddings", csv);
  st.input("model", model_text);
  Dataset ds = load_embedding_csv(st.path("embeddings.csv"));

  Scorer scorer;
  auto j = nlohmann::json::parse(model_text);
  if (j.at("type") == "logistic") {
    LinearModel m = linear_model_from_json(model_text);
    scorer = [m](const std::vector<double>& x) { return m.predict(x); };
  } else {
    GbtModel m = gbt_model_from_json(model_text);
    scorer = [m](const std::vector<double>& x) { return m.predict(x); };
  }
  Metrics m = evaluate(scorer, ds, cfg.params.aggregate);
  st.write("metrics.csv", metrics_csv({}, m, cfg.params));
  nlohmann::json out;
  out["mean"] = metrics_json_obj(m);
  out["params"] = params_json(cfg.params);
  st.write("metrics.json", out.dump(2) + "\n");
  st.commit();
  std::cout << "eval: accuracy " << fmt_metric(m.accuracy) << ", auc_roc "
            << fmt_metric(m.auc_roc) << "\n";
}

void run_full_pipeline(const PipelineConfig& cfg) {
  run_graph_stage(cfg);
  run_rules_stage(cfg);
  run_embed_stage(cfg);

  Stage st("run", cfg);
  std::string facts = read_file(cfg.facts_path);
  st.input("facts", facts);
  KnowledgeBase kb = load_kb(cfg);
  CvResult cv = cross_validate(kb, cfg.params);
  st.write("metrics.csv", metrics_csv(cv.fold_metrics, cv.mean, cfg.params));
  nlohmann::json out;
  out["params"] = params_json(cfg.params);
  nlohmann::json folds = nlohmann::json::array();
  for (const Metrics& m : cv.fold_metrics) folds.push_back(metrics_json_obj(m));
  out["folds"] = std::move(folds);
  out["mean"] = metrics_json_obj(cv.mean);
  out["rules_per_fold"] = cv.rules_per_fold;
  st.write("metrics.json", out.dump(2) + "\n");
  st.commit();
  std::cout << "run: mean accuracy " << fmt_metric(cv.mean.accuracy) << ", recall "
            << fmt_metric(cv.mean.recall) << ", auc_roc " << fmt_metric(cv.mean.auc_roc)
            << "\n";
}

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::string& param,
                                const std::vector<int>& values, bool with_cv) {
  if (param != "r" && param != "k" && param != "w")
    throw ConfigError("sweep: param must be one of r, k, w");
  Stage st("sweep", cfg);
  std::string facts = read_file(cfg.facts_path);
  st.input("facts", facts);
  KnowledgeBase kb = load_kb(cfg);
  auto pos = positive_tuples(kb);
  auto neg = generate_negatives(kb, cfg.params.neg_ratio, cfg.params.seed);
  // Rules do not depend on r/k/w; learn once for the timing runs.
  auto rules = learn_rules(kb, pos, neg, cfg.params);
  if (rules.empty()) throw ConfigError("sweep: no rules learned");

  std::vector<SweepRow> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int v : values) {
    PipelineParams p = cfg.params;
    if (param == "r") p.r = v;
    if (param == "k") p.k = v;
    if (param == "w") p.w = v;

    auto t0 = std::chrono::steady_clock::now();
    auto rows = embed_tuples(kb, rules, pos, neg, p.r, p.k, p.w, p.seed, p.threads);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    SweepRow row;
    row.param = param;
    row.value = v;
    row.embed_seconds = secs;
    row.rows = rows.size();
    row.metrics = {nan, nan, nan, nan, nan};
    if (with_cv) row.metrics = cross_validate(kb, p).mean;
    out.push_back(row);
  }

  std::ostringstream os;
  os << "param,value,accuracy,recall,f1,auc_roc,auc_pr,embed_seconds,rows\n";
  for (const SweepRow& r : out) {
    os << r.param << ',' << r.value << ',' << fmt_metric(r.metrics.accuracy) << ','
       << fmt_metric(r.metrics.recall) << ',' << fmt_metric(r.metrics.f1) << ','
       << fmt_metric(r.metrics.auc_roc) << ',' << fmt_metric(r.metrics.auc_pr) << ','
       << fmt_metric(r.embed_seconds) << ',' << r.rows << "\n";
  }
  st.write("sweep_" + param + ".csv", os.str());
  st.commit();
  return out;
}

}  // namespace gaifman
