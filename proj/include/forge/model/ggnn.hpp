#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/graphs/graph.hpp"
#include "forge/model/params.hpp"

namespace forge::model {

struct GgnnConfig {
  int hidden_dim = 128;  // embedding dim equals hidden dim
  int steps = 8;
  int head_hidden = 128;
  int epochs = 3;
  double learning_rate = 0.001;
  int batch_token_budget = 4000;  // nodes per minibatch
  uint64_t seed = 0;

  // Guards user-facing flows; forward code itself accepts any positive
  // shapes so small-step properties stay testable.
  void validate() const;

  bool operator==(const GgnnConfig&) const = default;

  Json to_json() const;
  static GgnnConfig from_json(const Json& v, const std::string& where);
};

class EmptyInvariantNodes : public ForgeError {
 public:
  explicit EmptyInvariantNodes(const std::string& method)
      : ForgeError("graph for '" + method + "' has no invariant nodes to read out") {}
};

class VocabularyMismatch : public ForgeError {
 public:
  explicit VocabularyMismatch(const std::string& what) : ForgeError(what) {}
};

// Tensors: subtok_embed |V|xm, kind_embed |K|xm, edge_w_0..5 mxm with
// edge_b_0..5, GRU gates (gru_wz/uz/wr/ur/wh/uh mxm, gru_bz/br/bh m), head
// (head_w1 hxm, head_b1 h, head_w2 h, head_b2 1).
ParamPack make_ggnn_params(const graphs::Vocabulary& vocab, const GgnnConfig& cfg);

// Several graphs fused into one disjoint union, ready for batched message
// passing. Building it validates invariant sets and the vocabulary.
struct GraphBatch {
  int total_nodes = 0;
  std::vector<int> kind_idx;                 // per node
  std::vector<std::vector<int>> subtok_idx;  // per node
  std::array<std::vector<int>, 6> edge_src;  // per edge kind
  std::array<std::vector<int>, 6> edge_dst;
  std::vector<std::vector<int>> invariant_rows;  // per graph
  std::vector<double> labels;                    // per graph, when labeled
};

GraphBatch build_batch(const std::vector<const graphs::MethodGraph*>& batch,
                       const graphs::Vocabulary& vocab, bool need_labels);

// Scores for every graph, in input order, batched by the node budget.
// Identical computation for the full model and the no-context ablation; the
// latter just receives invariant-only graphs.
std::vector<double> ggnn_scores(const std::vector<const graphs::MethodGraph*>& graphs_in,
                                const ParamPack& params, const graphs::Vocabulary& vocab,
                                const GgnnConfig& cfg);

// Mean binary cross-entropy over one batch plus its gradient (accumulated
// into `grads`, which must be zeros_like the params).
double ggnn_loss_grad(const GraphBatch& batch, const ParamPack& params,
                      const GgnnConfig& cfg, ParamPack& grads);

// Mean loss without gradients (used for epoch reporting and tests).
double ggnn_loss(const GraphBatch& batch, const ParamPack& params, const GgnnConfig& cfg);

}  // namespace forge::model
