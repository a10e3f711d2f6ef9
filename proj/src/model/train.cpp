#include "forge/model/train.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "forge/rng.hpp"

namespace forge::model {

namespace {

// Bias-corrected Adam over the flat parameter buffer. One step per
// minibatch; state persists across epochs.
struct Adam {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<double> m, v;
  double lr;
  int64_t t = 0;

  Adam(size_t n, double lr_in) : m(n, 0.0), v(n, 0.0), lr(lr_in) {}

  void step(ParamPack& params, const ParamPack& grads) {
    ++t;
    double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    auto& p = params.flat();
    const auto& g = grads.flat();
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  }
};

// Greedy packing in the given order. A batch always holds at least one
// sample, so an over-budget sample still trains alone.
std::vector<std::vector<int>> pack_batches(const std::vector<int>& order,
                                           const std::vector<int>& costs, int budget) {
  std::vector<std::vector<int>> batches;
  std::vector<int> cur;
  int total = 0;
  for (int idx : order) {
    if (!cur.empty() && total + costs[idx] > budget) {
      batches.push_back(std::move(cur));
      cur.clear();
      total = 0;
    }
    cur.push_back(idx);
    total += costs[idx];
  }
  if (!cur.empty()) batches.push_back(std::move(cur));
  return batches;
}

// Epoch shuffles draw from streams far above the Xavier per-tensor ones so
// the two never collide for any realistic tensor count.
constexpr uint64_t kShuffleStreamBase = 1ULL << 20;

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Ggnn: return "ggnn";
    case ModelKind::NoContext: return "no_context";
    case ModelKind::Rnn: return "rnn";
  }
  throw ForgeError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "ggnn") return ModelKind::Ggnn;
  if (name == "no_context") return ModelKind::NoContext;
  if (name == "rnn") return ModelKind::Rnn;
  throw ForgeError("unknown model kind '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  Json v = Json::object();
  v["version"] = ckpt.version;
  v["kind"] = model_kind_name(ckpt.kind);
  v["epoch"] = ckpt.epoch;
  v["ggnn_config"] = ckpt.ggnn.to_json();
  v["rnn_config"] = ckpt.rnn.to_json();
  v["vocabulary"] = ckpt.vocab.to_json();
  v["params"] = ckpt.params.to_json();
  write_json_file(path, v);
}

Checkpoint load_checkpoint(const std::string& path) {
  Json v = read_json_file(path);
  if (!v.is_object()) throw FormatError(path, "checkpoint must be an object");
  for (const char* f : {"version", "kind", "epoch", "ggnn_config", "rnn_config",
                        "vocabulary", "params"})
    if (!v.contains(f)) throw FormatError(path, std::string("missing field '") + f + "'");
  if (!v["version"].is_number_integer() || v["version"].get<int>() != 1)
    throw FormatError(path, "unsupported checkpoint version");
  if (!v["kind"].is_string()) throw FormatError(path, "kind must be a string");
  if (!v["epoch"].is_number_integer()) throw FormatError(path, "epoch must be an integer");
  Checkpoint ck;
  ck.kind = model_kind_from_name(v["kind"].get<std::string>());
  ck.epoch = v["epoch"].get<int>();
  ck.ggnn = GgnnConfig::from_json(v["ggnn_config"], path);
  ck.rnn = RnnConfig::from_json(v["rnn_config"], path);
  ck.vocab = graphs::Vocabulary::from_json(v["vocabulary"], path);
  ck.params = ParamPack::from_json(v["params"], path);
  return ck;
}

TrainResult train(ModelKind kind, const std::vector<graphs::MethodGraph>& graphs_in,
                  const graphs::Vocabulary& vocab, const GgnnConfig& ggnn_cfg,
                  const RnnConfig& rnn_cfg, const std::string& out_dir) {
  const bool is_rnn = kind == ModelKind::Rnn;
  if (is_rnn)
    rnn_cfg.validate();
  else
    ggnn_cfg.validate();
  if (graphs_in.empty()) throw ForgeError("no graphs to train on");

  const int epochs = is_rnn ? rnn_cfg.epochs : ggnn_cfg.epochs;
  const double lr = is_rnn ? rnn_cfg.learning_rate : ggnn_cfg.learning_rate;
  const int budget = is_rnn ? rnn_cfg.batch_token_budget : ggnn_cfg.batch_token_budget;
  const uint64_t seed = is_rnn ? rnn_cfg.seed : ggnn_cfg.seed;

  std::vector<TokenPair> pairs;
  std::vector<int> costs(graphs_in.size(), 0);
  for (size_t i = 0; i < graphs_in.size(); ++i) {
    const graphs::MethodGraph& g = graphs_in[i];
    if (!g.label) throw ForgeError("unlabeled graph for '" + g.method + "'");
    if (is_rnn) {
      pairs.push_back(token_pair(g));
      costs[i] = static_cast<int>(pairs.back().method_tokens.size() +
                                  pairs.back().invariant_tokens.size());
    } else {
      costs[i] = static_cast<int>(g.nodes.size());
    }
  }

  TrainResult result;
  result.checkpoint.kind = kind;
  result.checkpoint.ggnn = ggnn_cfg;
  result.checkpoint.rnn = rnn_cfg;
  result.checkpoint.vocab = vocab;

  ParamPack params = is_rnn ? make_rnn_params(vocab, rnn_cfg) : make_ggnn_params(vocab, ggnn_cfg);
  params.init_xavier(seed);
  ParamPack grads = params.zeros_like();
  Adam adam(params.size(), lr);

  std::vector<double> last_good = params.flat();
  int last_good_epoch = 0;

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  Lcg64 root(seed);
  std::vector<int> order(graphs_in.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    Lcg64 shuffler(root.fork(kShuffleStreamBase + static_cast<uint64_t>(epoch)));
    shuffler.shuffle(order);

    double loss_sum = 0.0;
    size_t seen = 0;
    for (const std::vector<int>& batch_idx : pack_batches(order, costs, budget)) {
      grads.set_zero();
      double loss = 0.0;
      if (is_rnn) {
        std::vector<const TokenPair*> batch;
        batch.reserve(batch_idx.size());
        for (int i : batch_idx) batch.push_back(&pairs[i]);
        loss = rnn_loss_grad(batch, params, vocab, rnn_cfg, grads);
      } else {
        std::vector<const graphs::MethodGraph*> batch;
        batch.reserve(batch_idx.size());
        for (int i : batch_idx) batch.push_back(&graphs_in[i]);
        GraphBatch gb = build_batch(batch, vocab, true);
        loss = ggnn_loss_grad(gb, params, ggnn_cfg, grads);
      }
      if (!std::isfinite(loss)) {
        result.diverged = true;
        break;
      }
      adam.step(params, grads);
      loss_sum += loss * static_cast<double>(batch_idx.size());
      seen += batch_idx.size();
    }

    if (result.diverged || !params.all_finite()) {
      result.diverged = true;
      params.flat() = last_good;
      break;
    }

    result.epochs.push_back({epoch, loss_sum / static_cast<double>(seen)});
    last_good = params.flat();
    last_good_epoch = epoch;

    if (!out_dir.empty()) {
      Checkpoint ck;
      ck.kind = kind;
      ck.epoch = epoch;
      ck.ggnn = ggnn_cfg;
      ck.rnn = rnn_cfg;
      ck.vocab = vocab;
      ck.params = params;
      std::string path = out_dir + "/checkpoint_epoch_" + std::to_string(epoch) + ".json";
      save_checkpoint(path, ck);
      result.checkpoint_paths.push_back(path);
    }
  }

  result.checkpoint.epoch = last_good_epoch;
  result.checkpoint.params = std::move(params);
  return result;
}

std::vector<double> predict(const Checkpoint& ckpt,
                            const std::vector<graphs::MethodGraph>& graphs_in) {
  if (ckpt.kind == ModelKind::Rnn) {
    std::vector<double> scores;
    scores.reserve(graphs_in.size());
    for (const graphs::MethodGraph& g : graphs_in)
      scores.push_back(rnn_score(token_pair(g), ckpt.params, ckpt.vocab, ckpt.rnn));
    return scores;
  }
  std::vector<const graphs::MethodGraph*> ptrs;
  ptrs.reserve(graphs_in.size());
  for (const graphs::MethodGraph& g : graphs_in) ptrs.push_back(&g);
  return ggnn_scores(ptrs, ckpt.params, ckpt.vocab, ckpt.ggnn);
}

}  // namespace forge::model
