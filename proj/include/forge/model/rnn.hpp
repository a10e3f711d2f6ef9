#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/graphs/graph.hpp"
#include "forge/model/params.hpp"

namespace forge::model {

struct RnnConfig {
  int embedding_dim = 300;
  int state_dim = 250;  // per direction; concat of both = 500 per encoder
  int head_hidden = 128;
  int epochs = 3;
  double learning_rate = 0.001;
  int batch_token_budget = 4000;  // tokens per minibatch
  uint64_t seed = 0;

  void validate() const;

  bool operator==(const RnnConfig&) const = default;

  Json to_json() const;
  static RnnConfig from_json(const Json& v, const std::string& where);
};

class EmptyInput : public ForgeError {
 public:
  explicit EmptyInput(const std::string& which)
      : ForgeError(which + " token list is empty") {}
};

// One sample: the method's token texts and the invariant's token texts,
// taken from a method graph's token chain.
struct TokenPair {
  std::vector<std::string> method_tokens;
  std::vector<std::string> invariant_tokens;
  double label = 0.0;
};

// Token texts in chain order; invariant membership splits the two lists.
TokenPair token_pair(const graphs::MethodGraph& graph);

// Shared embedding table, two bi-directional gated recurrent encoders with
// separate parameters (method/invariant x fwd/bwd), mean-pooled states
// concatenated into the head.
ParamPack make_rnn_params(const graphs::Vocabulary& vocab, const RnnConfig& cfg);

double rnn_score(const TokenPair& sample, const ParamPack& params,
                 const graphs::Vocabulary& vocab, const RnnConfig& cfg);

// Mean binary cross-entropy over the batch; gradients accumulate into
// `grads` (zeros_like the params).
double rnn_loss_grad(const std::vector<const TokenPair*>& batch, const ParamPack& params,
                     const graphs::Vocabulary& vocab, const RnnConfig& cfg, ParamPack& grads);

double rnn_loss(const std::vector<const TokenPair*>& batch, const ParamPack& params,
                const graphs::Vocabulary& vocab, const RnnConfig& cfg);

}  // namespace forge::model
