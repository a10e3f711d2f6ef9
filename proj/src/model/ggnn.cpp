#include "forge/model/ggnn.hpp"

#include <cmath>

namespace forge::model {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^s) without overflow.
double softplus(double s) { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }

struct Tape {
  std::vector<Mat> h;  // steps+1 states, N x m
  std::vector<Mat> msg, z, r, c;
  std::vector<Vec> readout;  // per graph, m
  std::vector<Vec> act;      // per graph, head_hidden
  std::vector<double> score;
};

// One pass of message passing + readout over a fused batch. The tape is
// optional; training fills it for the backward sweep.
void forward(const GraphBatch& b, const ParamPack& p, const GgnnConfig& cfg, Tape& tape,
             bool keep_tape) {
  const int n = b.total_nodes;
  const int m = cfg.hidden_dim;

  auto sub = p.mat("subtok_embed");
  auto kind = p.mat("kind_embed");
  Mat h0(n, m);
  for (int v = 0; v < n; ++v) {
    h0.row(v) = kind.row(b.kind_idx[v]);
    for (int s : b.subtok_idx[v]) h0.row(v) += sub.row(s);
  }
  tape.h.clear();
  tape.msg.clear();
  tape.z.clear();
  tape.r.clear();
  tape.c.clear();
  tape.h.push_back(std::move(h0));

  auto wz = p.mat("gru_wz"), uz = p.mat("gru_uz");
  auto wr = p.mat("gru_wr"), ur = p.mat("gru_ur");
  auto wh = p.mat("gru_wh"), uh = p.mat("gru_uh");
  auto bz = p.vec("gru_bz"), br = p.vec("gru_br"), bh = p.vec("gru_bh");

  for (int t = 0; t < cfg.steps; ++t) {
    const Mat& h = tape.h.back();
    Mat msg = Mat::Zero(n, m);
    for (int k = 0; k < 6; ++k) {
      const auto& src = b.edge_src[k];
      if (src.empty()) continue;
      const auto& dst = b.edge_dst[k];
      auto w = p.mat("edge_w_" + std::to_string(k));
      auto bias = p.vec("edge_b_" + std::to_string(k));
      Mat x(static_cast<int>(src.size()), m);
      for (size_t e = 0; e < src.size(); ++e) x.row(static_cast<int>(e)) = h.row(src[e]);
      Mat y = x * w.transpose();
      y.rowwise() += bias.transpose();
      for (size_t e = 0; e < dst.size(); ++e) msg.row(dst[e]) += y.row(static_cast<int>(e));
    }

    Mat az = msg * wz.transpose() + h * uz.transpose();
    az.rowwise() += bz.transpose();
    Mat z = az.array().unaryExpr([](double v) { return sigmoid(v); }).matrix();
    Mat ar = msg * wr.transpose() + h * ur.transpose();
    ar.rowwise() += br.transpose();
    Mat r = ar.array().unaryExpr([](double v) { return sigmoid(v); }).matrix();
    Mat rh = r.array() * h.array();
    Mat ac = msg * wh.transpose() + rh * uh.transpose();
    ac.rowwise() += bh.transpose();
    Mat c = ac.array().tanh().matrix();
    Mat hn = ((1.0 - z.array()) * h.array() + z.array() * c.array()).matrix();

    if (keep_tape) {
      tape.msg.push_back(std::move(msg));
      tape.z.push_back(std::move(z));
      tape.r.push_back(std::move(r));
      tape.c.push_back(std::move(c));
      tape.h.push_back(std::move(hn));
    } else {
      tape.h.back() = std::move(hn);
    }
  }

  auto w1 = p.mat("head_w1");
  auto b1 = p.vec("head_b1");
  auto w2 = p.vec("head_w2");
  double b2 = p.vec("head_b2")(0);
  const Mat& hk = tape.h.back();
  tape.readout.clear();
  tape.act.clear();
  tape.score.clear();
  for (const auto& rows : b.invariant_rows) {
    Vec readout = Vec::Zero(m);
    for (int row : rows) readout += hk.row(row).transpose();
    readout /= static_cast<double>(rows.size());
    Vec act = (w1 * readout + b1).array().tanh().matrix();
    tape.readout.push_back(readout);
    tape.act.push_back(act);
    tape.score.push_back(w2.dot(act) + b2);
  }
}

double mean_loss(const Tape& tape, const std::vector<double>& labels) {
  double total = 0.0;
  for (size_t g = 0; g < tape.score.size(); ++g)
    total += softplus(tape.score[g]) - labels[g] * tape.score[g];
  return total / static_cast<double>(tape.score.size());
}

}  // namespace

void GgnnConfig::validate() const {
  if (hidden_dim < 1) throw ForgeError("hidden_dim must be positive");
  if (steps < 8) throw ForgeError("steps must be at least 8");
  if (head_hidden < 1) throw ForgeError("head_hidden must be positive");
  if (epochs < 1) throw ForgeError("epochs must be positive");
  if (!(learning_rate > 0.0)) throw ForgeError("learning_rate must be positive");
  if (batch_token_budget < 1) throw ForgeError("batch_token_budget must be positive");
}

Json GgnnConfig::to_json() const {
  Json v = Json::object();
  v["hidden_dim"] = hidden_dim;
  v["steps"] = steps;
  v["head_hidden"] = head_hidden;
  v["epochs"] = epochs;
  v["learning_rate"] = learning_rate;
  v["batch_token_budget"] = batch_token_budget;
  v["seed"] = seed;
  return v;
}

GgnnConfig GgnnConfig::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "config must be an object");
  GgnnConfig cfg;
  auto get_int = [&](const char* f, int& out) {
    if (!v.contains(f)) return;
    if (!v[f].is_number_integer()) throw FormatError(where, std::string(f) + " must be an integer");
    out = v[f].get<int>();
  };
  get_int("hidden_dim", cfg.hidden_dim);
  get_int("steps", cfg.steps);
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

ParamPack make_ggnn_params(const graphs::Vocabulary& vocab, const GgnnConfig& cfg) {
  ParamPack p;
  int m = cfg.hidden_dim;
  p.add("subtok_embed", vocab.subtoken_rows(), m);
  p.add("kind_embed", vocab.kind_rows(), m);
  for (int k = 0; k < 6; ++k) {
    p.add("edge_w_" + std::to_string(k), m, m);
    p.add("edge_b_" + std::to_string(k), m, 1, true);
  }
  for (const char* gate : {"z", "r", "h"}) {
    p.add(std::string("gru_w") + gate, m, m);
    p.add(std::string("gru_u") + gate, m, m);
    p.add(std::string("gru_b") + gate, m, 1, true);
  }
  p.add("head_w1", cfg.head_hidden, m);
  p.add("head_b1", cfg.head_hidden, 1, true);
  p.add("head_w2", cfg.head_hidden, 1);
  p.add("head_b2", 1, 1, true);
  return p;
}

GraphBatch build_batch(const std::vector<const graphs::MethodGraph*>& batch,
                       const graphs::Vocabulary& vocab, bool need_labels) {
  GraphBatch b;
  for (const graphs::MethodGraph* g : batch) {
    if (g->invariant_nodes.empty()) throw EmptyInvariantNodes(g->method);
    if (need_labels && !g->label)
      throw ForgeError("graph for '" + g->method + "' is unlabeled");
    int base = b.total_nodes;
    for (const graphs::GraphNode& node : g->nodes) {
      auto it = vocab.kinds.find(minilang::node_kind_name(node.kind));
      if (it == vocab.kinds.end())
        throw VocabularyMismatch("node kind '" +
                                 std::string(minilang::node_kind_name(node.kind)) +
                                 "' missing from vocabulary");
      b.kind_idx.push_back(it->second);
      std::vector<int> subs;
      for (const std::string& s : graphs::subtokenize(node.text))
        subs.push_back(vocab.subtoken_index(s));
      b.subtok_idx.push_back(std::move(subs));
    }
    for (const graphs::Edge& e : g->edges) {
      int k = static_cast<int>(e.kind);
      b.edge_src[k].push_back(base + e.src);
      b.edge_dst[k].push_back(base + e.dst);
    }
    std::vector<int> rows;
    for (int id : g->invariant_nodes) rows.push_back(base + id);
    b.invariant_rows.push_back(std::move(rows));
    if (need_labels) b.labels.push_back(*g->label ? 1.0 : 0.0);
    b.total_nodes += static_cast<int>(g->nodes.size());
  }
  return b;
}

std::vector<double> ggnn_scores(const std::vector<const graphs::MethodGraph*>& graphs_in,
                                const ParamPack& params, const graphs::Vocabulary& vocab,
                                const GgnnConfig& cfg) {
  std::vector<double> out;
  size_t i = 0;
  while (i < graphs_in.size()) {
    std::vector<const graphs::MethodGraph*> chunk;
    int nodes = 0;
    while (i < graphs_in.size()) {
      int sz = static_cast<int>(graphs_in[i]->nodes.size());
      if (!chunk.empty() && nodes + sz > cfg.batch_token_budget) break;
      chunk.push_back(graphs_in[i]);
      nodes += sz;
      ++i;
    }
    GraphBatch batch = build_batch(chunk, vocab, false);
    Tape tape;
    forward(batch, params, cfg, tape, false);
    for (double s : tape.score) out.push_back(sigmoid(s));
  }
  return out;
}

double ggnn_loss(const GraphBatch& batch, const ParamPack& params, const GgnnConfig& cfg) {
  if (batch.labels.size() != batch.invariant_rows.size())
    throw ForgeError("loss needs labels for every graph");
  Tape tape;
  forward(batch, params, cfg, tape, false);
  return mean_loss(tape, batch.labels);
}

double ggnn_loss_grad(const GraphBatch& b, const ParamPack& p, const GgnnConfig& cfg,
                      ParamPack& grads) {
  if (b.labels.size() != b.invariant_rows.size())
    throw ForgeError("loss needs labels for every graph");
  Tape tape;
  forward(b, p, cfg, tape, true);
  double loss = mean_loss(tape, b.labels);

  const int n = b.total_nodes;
  const int m = cfg.hidden_dim;
  const double scale = 1.0 / static_cast<double>(b.labels.size());

  auto w1 = p.mat("head_w1");
  auto w2 = p.vec("head_w2");
  auto gw1 = grads.mat("head_w1");
  auto gb1 = grads.vec("head_b1");
  auto gw2 = grads.vec("head_w2");
  auto gb2 = grads.vec("head_b2");

  Mat dh = Mat::Zero(n, m);
  for (size_t g = 0; g < b.labels.size(); ++g) {
    double ds = (sigmoid(tape.score[g]) - b.labels[g]) * scale;
    const Vec& act = tape.act[g];
    gw2 += ds * act;
    gb2(0) += ds;
    Vec dact = ds * w2;
    Vec dpre = dact.array() * (1.0 - act.array().square());
    gw1 += dpre * tape.readout[g].transpose();
    gb1 += dpre;
    Vec dreadout = w1.transpose() * dpre;
    const auto& rows = b.invariant_rows[g];
    double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int row : rows) dh.row(row) += (dreadout * inv_n).transpose();
  }

  auto wz = p.mat("gru_wz"), uz = p.mat("gru_uz");
  auto wr = p.mat("gru_wr"), ur = p.mat("gru_ur");
  auto wh = p.mat("gru_wh"), uh = p.mat("gru_uh");
  auto gwz = grads.mat("gru_wz"), guz = grads.mat("gru_uz");
  auto gwr = grads.mat("gru_wr"), gur = grads.mat("gru_ur");
  auto gwh = grads.mat("gru_wh"), guh = grads.mat("gru_uh");
  auto gbz = grads.vec("gru_bz"), gbr = grads.vec("gru_br"), gbh = grads.vec("gru_bh");

  for (int t = cfg.steps - 1; t >= 0; --t) {
    const Mat& h = tape.h[t];
    const Mat& msg = tape.msg[t];
    const Mat& z = tape.z[t];
    const Mat& r = tape.r[t];
    const Mat& c = tape.c[t];

    Mat dz = (dh.array() * (c.array() - h.array())).matrix();
    Mat dc = (dh.array() * z.array()).matrix();
    Mat dhp = (dh.array() * (1.0 - z.array())).matrix();

    Mat dac = (dc.array() * (1.0 - c.array().square())).matrix();
    Mat dmsg = dac * wh;
    gwh += dac.transpose() * msg;
    Mat drh = dac * uh;
    guh += dac.transpose() * (r.array() * h.array()).matrix();
    gbh += dac.colwise().sum().transpose();
    Mat dr = (drh.array() * h.array()).matrix();
    dhp += (drh.array() * r.array()).matrix();

    Mat dar = (dr.array() * r.array() * (1.0 - r.array())).matrix();
    dmsg += dar * wr;
    gwr += dar.transpose() * msg;
    gur += dar.transpose() * h;
    dhp += dar * ur;
    gbr += dar.colwise().sum().transpose();

    Mat daz = (dz.array() * z.array() * (1.0 - z.array())).matrix();
    dmsg += daz * wz;
    gwz += daz.transpose() * msg;
    guz += daz.transpose() * h;
    dhp += daz * uz;
    gbz += daz.colwise().sum().transpose();

    for (int k = 0; k < 6; ++k) {
      const auto& src = b.edge_src[k];
      if (src.empty()) continue;
      const auto& dst = b.edge_dst[k];
      auto w = p.mat("edge_w_" + std::to_string(k));
      auto gw = grads.mat("edge_w_" + std::to_string(k));
      auto gb = grads.vec("edge_b_" + std::to_string(k));
      int en = static_cast<int>(src.size());
      Mat dy(en, m), x(en, m);
      for (int e = 0; e < en; ++e) {
        dy.row(e) = dmsg.row(dst[e]);
        x.row(e) = h.row(src[e]);
      }
      gw += dy.transpose() * x;
      gb += dy.colwise().sum().transpose();
      Mat dx = dy * w;
      for (int e = 0; e < en; ++e) dhp.row(src[e]) += dx.row(e);
    }
    dh = std::move(dhp);
  }

  auto gsub = grads.mat("subtok_embed");
  auto gkind = grads.mat("kind_embed");
  for (int v = 0; v < n; ++v) {
    gkind.row(b.kind_idx[v]) += dh.row(v);
    for (int s : b.subtok_idx[v]) gsub.row(s) += dh.row(v);
  }
  return loss;
}

}  // namespace forge::model
