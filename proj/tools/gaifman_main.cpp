#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaifman/pipeline.hpp"

using namespace gaifman;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaifman-model link prediction: rule learning, neighborhood "
               "count embeddings, classification"};
  app.require_subcommand(1);

  std::string config_path;
  // (key, value) overrides collected from flags; flags win over the config file.
  std::vector<std::pair<std::string, std::string>> overrides;

  auto add_opt = [&](CLI::App* cmd, const std::string& flag, const std::string& key,
                     const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
        help);
  };

  std::string sweep_param = "w";
  std::string sweep_values = "1,5,10,20";
  bool sweep_no_cv = false;

  std::vector<CLI::App*> cmds;
  for (const char* name : {"graph", "rules", "embed", "train", "eval", "run", "sweep"}) {
    CLI::App* cmd = app.add_subcommand(name, "");
    cmd->add_option("--config", config_path, "flat key = value config file");
    add_opt(cmd, "--facts", "facts", "fact file path");
    add_opt(cmd, "--target", "target", "target predicate (overrides @target)");
    add_opt(cmd, "--out", "output_dir", "output directory");
    add_opt(cmd, "--method", "method", "rule learner: rw|ilp|relocc");
    add_opt(cmd, "--classifier", "classifier", "lr|gb");
    add_opt(cmd, "--r", "r", "neighborhood depth");
    add_opt(cmd, "--k", "k", "neighbors sampled per entity");
    add_opt(cmd, "--w", "w", "neighborhoods per tuple");
    add_opt(cmd, "--lambda", "lambda", "tree-distance decay rate");
    add_opt(cmd, "--neg-ratio", "neg_ratio", "negatives per positive");
    add_opt(cmd, "--seed", "seed", "RNG seed");
    add_opt(cmd, "--folds", "folds", "cross-validation folds");
    add_opt(cmd, "--threads", "threads", "worker thread cap");
    add_opt(cmd, "--aggregate", "aggregate", "per_row|per_tuple_mean");
    add_opt(cmd, "--walks", "rw_walks", "random walks to sample");
    add_opt(cmd, "--walk-len", "rw_max_len", "max walk length");
    add_opt(cmd, "--max-rules", "ilp_max_rules", "ILP rule cap");
    add_opt(cmd, "--max-clause-len", "ilp_max_len", "ILP max body literals");
    add_opt(cmd, "--beam", "ilp_beam", "ILP beam width");
    add_opt(cmd, "--min-score", "ilp_min_score", "ILP minimum clause score");
    add_opt(cmd, "--trees", "relocc_trees", "relOCC tree count");
    add_opt(cmd, "--tree-depth", "relocc_max_depth", "relOCC max tree depth");
    add_opt(cmd, "--lr-rate", "lr_rate", "logistic learning rate");
    add_opt(cmd, "--lr-epochs", "lr_epochs", "logistic epochs");
    add_opt(cmd, "--lr-l2", "lr_l2", "logistic L2 strength");
    add_opt(cmd, "--gb-rounds", "gb_rounds", "boosting rounds");
    add_opt(cmd, "--gb-depth", "gb_depth", "boosting tree depth");
    add_opt(cmd, "--gb-shrinkage", "gb_shrinkage", "boosting shrinkage");
    if (std::string(name) == "sweep") {
      cmd->add_option("--param", sweep_param, "swept parameter: r|k|w");
      cmd->add_option("--values", sweep_values, "comma-separated values");
      cmd->add_flag("--no-cv", sweep_no_cv, "skip cross-validation, timing only");
    }
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value);

    if (stage == "graph") run_graph_stage(cfg);
    else if (stage == "rules") run_rules_stage(cfg);
    else if (stage == "embed") run_embed_stage(cfg);
    else if (stage == "train") run_train_stage(cfg);
    else if (stage == "eval") run_eval_stage(cfg);
    else if (stage == "run") run_full_pipeline(cfg);
    else if (stage == "sweep") run_sweep(cfg, sweep_param, parse_int_list(sweep_values),
                                         !sweep_no_cv);
  } catch (const std::exception& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
