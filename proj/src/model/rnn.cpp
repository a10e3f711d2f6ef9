#include "forge/model/rnn.hpp"

#include <cmath>

namespace forge::model {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double softplus(double s) { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }

const char* kEncoders[2] = {"method", "invariant"};
const char* kDirections[2] = {"fwd", "bwd"};

std::string pname(int enc, int dir, const char* tensor) {
  return std::string(kEncoders[enc]) + "_" + kDirections[dir] + "_" + tensor;
}

// Per-token embeddings: sum of subtoken rows, like the GGNN's h0 minus the
// kind component (token lists carry no kinds).
std::vector<Vec> embed_tokens(const std::vector<std::string>& tokens, const ParamPack& p,
                              const graphs::Vocabulary& vocab, int dim) {
  auto table = p.mat("embed");
  std::vector<Vec> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    Vec x = Vec::Zero(dim);
    for (const std::string& s : graphs::subtokenize(tok))
      x += table.row(vocab.subtoken_index(s)).transpose();
    out.push_back(std::move(x));
  }
  return out;
}

struct GruStep {
  Vec z, r, c, h;
};

struct DirTape {
  std::vector<GruStep> steps;  // in processing order
};

// One direction of one encoder over the sequence; order maps processing
// step -> token index.
DirTape run_dir(const std::vector<Vec>& xs, const ParamPack& p, int enc, int dir, int s) {
  auto wz = p.mat(pname(enc, dir, "wz")), uz = p.mat(pname(enc, dir, "uz"));
  auto wr = p.mat(pname(enc, dir, "wr")), ur = p.mat(pname(enc, dir, "ur"));
  auto wh = p.mat(pname(enc, dir, "wh")), uh = p.mat(pname(enc, dir, "uh"));
  auto bz = p.vec(pname(enc, dir, "bz")), br = p.vec(pname(enc, dir, "br")),
       bh = p.vec(pname(enc, dir, "bh"));
  size_t len = xs.size();
  DirTape tape;
  tape.steps.resize(len);
  Vec h = Vec::Zero(s);
  for (size_t step = 0; step < len; ++step) {
    size_t idx = dir == 0 ? step : len - 1 - step;
    const Vec& x = xs[idx];
    GruStep& st = tape.steps[step];
    st.z = (wz * x + uz * h + bz).array().unaryExpr([](double v) { return sigmoid(v); });
    st.r = (wr * x + ur * h + br).array().unaryExpr([](double v) { return sigmoid(v); });
    st.c = (wh * x + uh * (st.r.array() * h.array()).matrix() + bh).array().tanh();
    st.h = ((1.0 - st.z.array()) * h.array() + st.z.array() * st.c.array()).matrix();
    h = st.h;
  }
  return tape;
}

// Backward through one direction. dstate[step] is the gradient flowing into
// that step's hidden state from pooling; returns gradients on the embedded
// inputs (indexed by token position).
void back_dir(const std::vector<Vec>& xs, const DirTape& tape, const std::vector<Vec>& dstate,
              const ParamPack& p, int enc, int dir, int s, ParamPack& grads,
              std::vector<Vec>& dxs) {
  auto wz = p.mat(pname(enc, dir, "wz")), uz = p.mat(pname(enc, dir, "uz"));
  auto wr = p.mat(pname(enc, dir, "wr")), ur = p.mat(pname(enc, dir, "ur"));
  auto wh = p.mat(pname(enc, dir, "wh")), uh = p.mat(pname(enc, dir, "uh"));
  auto gwz = grads.mat(pname(enc, dir, "wz")), guz = grads.mat(pname(enc, dir, "uz"));
  auto gwr = grads.mat(pname(enc, dir, "wr")), gur = grads.mat(pname(enc, dir, "ur"));
  auto gwh = grads.mat(pname(enc, dir, "wh")), guh = grads.mat(pname(enc, dir, "uh"));
  auto gbz = grads.vec(pname(enc, dir, "bz")), gbr = grads.vec(pname(enc, dir, "br")),
       gbh = grads.vec(pname(enc, dir, "bh"));

  size_t len = xs.size();
  Vec carry = Vec::Zero(s);
  for (size_t back = 0; back < len; ++back) {
    size_t step = len - 1 - back;
    size_t idx = dir == 0 ? step : len - 1 - step;
    const GruStep& st = tape.steps[step];
    Vec hprev = step == 0 ? Vec(Vec::Zero(s)) : tape.steps[step - 1].h;
    Vec dht = dstate[step] + carry;

    Vec dz = (dht.array() * (st.c.array() - hprev.array())).matrix();
    Vec dc = (dht.array() * st.z.array()).matrix();
    Vec dhp = (dht.array() * (1.0 - st.z.array())).matrix();

    Vec dac = (dc.array() * (1.0 - st.c.array().square())).matrix();
    gwh += dac * xs[idx].transpose();
    guh += dac * (st.r.array() * hprev.array()).matrix().transpose();
    gbh += dac;
    dxs[idx] += wh.transpose() * dac;
    Vec drh = uh.transpose() * dac;
    Vec dr = (drh.array() * hprev.array()).matrix();
    dhp += (drh.array() * st.r.array()).matrix();

    Vec dar = (dr.array() * st.r.array() * (1.0 - st.r.array())).matrix();
    gwr += dar * xs[idx].transpose();
    gur += dar * hprev.transpose();
    gbr += dar;
    dxs[idx] += wr.transpose() * dar;
    dhp += ur.transpose() * dar;

    Vec daz = (dz.array() * st.z.array() * (1.0 - st.z.array())).matrix();
    gwz += daz * xs[idx].transpose();
    guz += daz * hprev.transpose();
    gbz += daz;
    dxs[idx] += wz.transpose() * daz;
    dhp += uz.transpose() * daz;

    carry = std::move(dhp);
  }
}

struct SampleTape {
  std::vector<Vec> xs[2];    // embedded tokens per encoder
  DirTape dirs[2][2];        // encoder x direction
  Vec pooled;                // 4s concat
  Vec act;                   // head_hidden
  double score = 0.0;
};

SampleTape forward_sample(const TokenPair& sample, const ParamPack& p,
                          const graphs::Vocabulary& vocab, const RnnConfig& cfg) {
  if (sample.method_tokens.empty()) throw EmptyInput("method");
  if (sample.invariant_tokens.empty()) throw EmptyInput("invariant");
  SampleTape tape;
  tape.xs[0] = embed_tokens(sample.method_tokens, p, vocab, cfg.embedding_dim);
  tape.xs[1] = embed_tokens(sample.invariant_tokens, p, vocab, cfg.embedding_dim);
  int s = cfg.state_dim;
  tape.pooled = Vec::Zero(4 * s);
  for (int enc = 0; enc < 2; ++enc) {
    size_t len = tape.xs[enc].size();
    for (int dir = 0; dir < 2; ++dir) {
      tape.dirs[enc][dir] = run_dir(tape.xs[enc], p, enc, dir, s);
      // Token t's state: fwd step t, bwd step len-1-t. Mean over tokens.
      Vec pool = Vec::Zero(s);
      for (size_t step = 0; step < len; ++step) pool += tape.dirs[enc][dir].steps[step].h;
      pool /= static_cast<double>(len);
      tape.pooled.segment((2 * enc + dir) * s, s) = pool;
    }
  }
  Vec pre = p.mat("head_w1") * tape.pooled + p.vec("head_b1");
  tape.act = pre.array().tanh();
  tape.score = p.vec("head_w2").dot(tape.act) + p.vec("head_b2")(0);
  return tape;
}

}  // namespace

void RnnConfig::validate() const {
  if (embedding_dim < 1) throw ForgeError("embedding_dim must be positive");
  if (state_dim < 1) throw ForgeError("state_dim must be positive");
  if (head_hidden < 1) throw ForgeError("head_hidden must be positive");
  if (epochs < 1) throw ForgeError("epochs must be positive");
  if (!(learning_rate > 0.0)) throw ForgeError("learning_rate must be positive");
  if (batch_token_budget < 1) throw ForgeError("batch_token_budget must be positive");
}

Json RnnConfig::to_json() const {
  Json v = Json::object();
  v["embedding_dim"] = embedding_dim;
  v["state_dim"] = state_dim;
  v["head_hidden"] = head_hidden;
  v["epochs"] = epochs;
  v["learning_rate"] = learning_rate;
  v["batch_token_budget"] = batch_token_budget;
  v["seed"] = seed;
  return v;
}

RnnConfig RnnConfig::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "config must be an object");
  RnnConfig cfg;
  auto get_int = [&](const char* f, int& out) {
    if (!v.contains(f)) return;
    if (!v[f].is_number_integer()) throw FormatError(where, std::string(f) + " must be an integer");
    out = v[f].get<int>();
  };
  get_int("embedding_dim", cfg.embedding_dim);
  get_int("state_dim", cfg.state_dim);
  get_int("head_hidden", cfg.head_hidden);
  get_int("epochs", cfg.epochs);
  get_int("batch_token_budget", cfg.batch_token_budget);
  if (v.contains("learning_rate")) {
    if (!v["learning_rate"].is_number()) throw FormatError(where, "learning_rate must be numeric");
    cfg.learning_rate = v["learning_rate"].get<double>();
  }
  if (v.contains("seed")) {
    if (!v["seed"].is_number_unsigned() && !v["seed"].is_number_integer())
      throw FormatError(where, "seed must be an integer");
    cfg.seed = v["seed"].get<uint64_t>();
  }
  return cfg;
}

TokenPair token_pair(const graphs::MethodGraph& graph) {
  TokenPair pair;
  std::vector<bool> has_children(graph.nodes.size(), false);
  for (const graphs::Edge& e : graph.edges)
    if (e.kind == graphs::EdgeKind::Child) has_children[e.src] = true;
  for (const graphs::GraphNode& n : graph.nodes) {
    if (has_children[n.id] || n.text.empty()) continue;
    switch (n.kind) {
      case minilang::NodeKind::Ident:
      case minilang::NodeKind::Int:
      case minilang::NodeKind::Float:
      case minilang::NodeKind::Str:
      case minilang::NodeKind::Null:
      case minilang::NodeKind::Op:
      case minilang::NodeKind::InvReturn:
        if (graph.invariant_nodes.count(n.id))
          pair.invariant_tokens.push_back(n.text);
        else
          pair.method_tokens.push_back(n.text);
        break;
      default:
        break;
    }
  }
  if (graph.label) pair.label = *graph.label ? 1.0 : 0.0;
  return pair;
}

ParamPack make_rnn_params(const graphs::Vocabulary& vocab, const RnnConfig& cfg) {
  ParamPack p;
  int e = cfg.embedding_dim;
  int s = cfg.state_dim;
  p.add("embed", vocab.subtoken_rows(), e);
  for (int enc = 0; enc < 2; ++enc) {
    for (int dir = 0; dir < 2; ++dir) {
      for (const char* gate : {"z", "r", "h"}) {
        p.add(pname(enc, dir, (std::string("w") + gate).c_str()), s, e);
        p.add(pname(enc, dir, (std::string("u") + gate).c_str()), s, s);
        p.add(pname(enc, dir, (std::string("b") + gate).c_str()), s, 1, true);
      }
    }
  }
  p.add("head_w1", cfg.head_hidden, 4 * s);
  p.add("head_b1", cfg.head_hidden, 1, true);
  p.add("head_w2", cfg.head_hidden, 1);
  p.add("head_b2", 1, 1, true);
  return p;
}

double rnn_score(const TokenPair& sample, const ParamPack& params,
                 const graphs::Vocabulary& vocab, const RnnConfig& cfg) {
  return sigmoid(forward_sample(sample, params, vocab, cfg).score);
}

double rnn_loss(const std::vector<const TokenPair*>& batch, const ParamPack& params,
                const graphs::Vocabulary& vocab, const RnnConfig& cfg) {
  if (batch.empty()) throw ForgeError("empty batch");
  double total = 0.0;
  for (const TokenPair* sample : batch) {
    double score = forward_sample(*sample, params, vocab, cfg).score;
    total += softplus(score) - sample->label * score;
  }
  return total / static_cast<double>(batch.size());
}

double rnn_loss_grad(const std::vector<const TokenPair*>& batch, const ParamPack& p,
                     const graphs::Vocabulary& vocab, const RnnConfig& cfg, ParamPack& grads) {
  if (batch.empty()) throw ForgeError("empty batch");
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  int s = cfg.state_dim;

  auto gembed = grads.mat("embed");
  auto gw1 = grads.mat("head_w1");
  auto gb1 = grads.vec("head_b1");
  auto gw2 = grads.vec("head_w2");
  auto gb2 = grads.vec("head_b2");

  for (const TokenPair* sample : batch) {
    SampleTape tape = forward_sample(*sample, p, vocab, cfg);
    total += softplus(tape.score) - sample->label * tape.score;

    double ds = (sigmoid(tape.score) - sample->label) * scale;
    gw2 += ds * tape.act;
    gb2(0) += ds;
    Vec dact = ds * p.vec("head_w2");
    Vec dpre = (dact.array() * (1.0 - tape.act.array().square())).matrix();
    gw1 += dpre * tape.pooled.transpose();
    gb1 += dpre;
    Vec dpooled = p.mat("head_w1").transpose() * dpre;

    for (int enc = 0; enc < 2; ++enc) {
      const auto& xs = tape.xs[enc];
      size_t len = xs.size();
      std::vector<Vec> dxs(len, Vec::Zero(cfg.embedding_dim));
      for (int dir = 0; dir < 2; ++dir) {
        Vec dpool = dpooled.segment((2 * enc + dir) * s, s) / static_cast<double>(len);
        std::vector<Vec> dstate(len, dpool);
        back_dir(xs, tape.dirs[enc][dir], dstate, p, enc, dir, s, grads, dxs);
      }
      const auto& tokens = enc == 0 ? sample->method_tokens : sample->invariant_tokens;
      for (size_t t = 0; t < len; ++t)
        for (const std::string& tok : graphs::subtokenize(tokens[t]))
          gembed.row(vocab.subtoken_index(tok)) += dxs[t].transpose();
    }
  }
  return total * scale;
}

}  // namespace forge::model
