#pragma once

#include <map>
#include <string>
#include <vector>

#include "gaifman/cv.hpp"

namespace gaifman {

// Flat key = value config file; CLI flags override loaded values.
struct PipelineConfig {
  std::string facts_path;
  std::string target;  // optional; overrides the fact file's @target
  std::string output_dir = "out";
  PipelineParams params;
};

PipelineConfig load_config(const std::string& path);
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Parses the fact file named by the config, injecting `@target` when the
// config overrides it.
KnowledgeBase load_kb(const PipelineConfig& cfg);

// Stage entry points. Each writes its artifacts plus a
// `<stage>.manifest.json` (config echo, seed, input/output content hashes,
// wall-clock seconds) under output_dir, removing partial outputs on error.
void run_graph_stage(const PipelineConfig& cfg);
void run_rules_stage(const PipelineConfig& cfg);
void run_embed_stage(const PipelineConfig& cfg);
void run_train_stage(const PipelineConfig& cfg);
void run_eval_stage(const PipelineConfig& cfg);
void run_full_pipeline(const PipelineConfig& cfg);  // graph+rules+embed+CV metrics

struct SweepRow {
  std::string param;
  int value = 0;
  Metrics metrics;   // NaN-filled when with_cv is false
  double embed_seconds = 0;
  std::size_t rows = 0;
};

// One embedding run (timed) per value, optionally followed by full
// cross-validation for metrics; writes sweep.csv.
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::string& param,
                                const std::vector<int>& values, bool with_cv);

std::string metrics_csv(const std::vector<Metrics>& folds, const Metrics& mean,
                        const PipelineParams& params);

}  // namespace gaifman
