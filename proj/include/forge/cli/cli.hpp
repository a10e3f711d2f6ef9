#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/jsonl.hpp"

namespace forge::cli {

// One config file drives the whole pipeline; flags parsed by dispatch()
// override these after load. Unset stage paths resolve under `root`.
struct PipelineConfig {
  std::string root = "pipeline_out";
  std::string corpus_dir;
  std::string trace_dir;
  std::string labels_dir;
  std::string graphs_dir;
  std::string ckpt_dir;
  std::string eval_dir;

  bool generate = false;
  Json gen = Json::object();  // corpusgen config, used when generate is set

  int splits = 100;
  double fraction = 0.10;
  int min_splits = 10;
  int min_support = 5;

  std::string model = "ggnn";  // ggnn | rnn | nocontext
  Json model_settings = Json::object();

  // Held-out projects; empty picks the last quarter of the corpus (at least
  // one, never all).
  std::vector<std::string> test_projects;
  std::vector<double> partial_fpr = {0.05, 0.25};
  bool per_method = true;

  uint64_t seed = 0;
  bool seed_from_config = false;

  std::string corpus() const;
  std::string traces() const;
  std::string labels() const;
  std::string graphs() const;
  std::string checkpoints() const;
  std::string eval() const;

  void validate() const;
  Json to_json() const;
  static PipelineConfig from_json(const Json& v, const std::string& where);
};

// Entry point behind the `forge` binary. `args` excludes the program name.
// Returns 0 on success, 1 on domain errors, 2 on usage errors. Prints one
// machine-readable summary line to stdout (also stored in summary_out when
// given); logs go to stderr.
int dispatch(const std::vector<std::string>& args, std::string* summary_out = nullptr);

}  // namespace forge::cli
