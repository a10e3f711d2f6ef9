#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/graphs/graph.hpp"
#include "forge/model/ggnn.hpp"
#include "forge/model/params.hpp"
#include "forge/model/rnn.hpp"

namespace forge::model {

enum class ModelKind { Ggnn, NoContext, Rnn };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

// Self-describing training artifact: model identity, configs, vocabulary,
// and every tensor. Written once per epoch.
struct Checkpoint {
  int version = 1;
  ModelKind kind = ModelKind::Ggnn;
  int epoch = 0;
  GgnnConfig ggnn;
  RnnConfig rnn;
  graphs::Vocabulary vocab;
  ParamPack params;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

struct EpochStats {
  int epoch = 0;         // 1-based
  double mean_loss = 0;  // mean BCE over the epoch's batches, graph-weighted
};

struct TrainResult {
  Checkpoint checkpoint;  // after the last completed epoch (last good one on divergence)
  std::vector<EpochStats> epochs;
  bool diverged = false;
  std::vector<std::string> checkpoint_paths;  // one per epoch when out_dir given
};

// Adam (0.9/0.999, eps 1e-8) over shuffled minibatches greedily packed to
// the configured token budget. Deterministic for a fixed seed. NaN loss
// aborts the run and keeps the last epoch that finished cleanly.
// For Ggnn the graphs must carry injected invariants; for NoContext they
// must be invariant-only graphs; for Rnn both token lists must be
// non-empty. The relevant config's epochs/learning_rate/budget/seed drive
// the loop.
TrainResult train(ModelKind kind, const std::vector<graphs::MethodGraph>& graphs_in,
                  const graphs::Vocabulary& vocab, const GgnnConfig& ggnn_cfg,
                  const RnnConfig& rnn_cfg, const std::string& out_dir = "");

// Scores in input order, batched internally; a pure function of each graph.
std::vector<double> predict(const Checkpoint& ckpt,
                            const std::vector<graphs::MethodGraph>& graphs_in);

}  // namespace forge::model
