// Acceptance gate for the whole artifact. Each criterion prints one line:
//   ACCEPT <nn> <name>: PASS|FAIL (<details>)
// and the process exits nonzero if any criterion fails. Criteria can be run
// selectively by passing their numbers as arguments.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forge/cli/cli.hpp"
#include "forge/corpusgen/corpusgen.hpp"
#include "forge/error.hpp"
#include "forge/graphs/graph.hpp"
#include "forge/invariants/infer.hpp"
#include "forge/invariants/invariant.hpp"
#include "forge/jsonl.hpp"
#include "forge/labeler/label.hpp"
#include "forge/metrics/metrics.hpp"
#include "forge/minilang/interp.hpp"
#include "forge/minilang/parser.hpp"
#include "forge/model/ggnn.hpp"
#include "forge/model/params.hpp"
#include "forge/model/rnn.hpp"
#include "forge/model/train.hpp"
#include "forge/rng.hpp"
#include "forge/trace/record.hpp"

using namespace forge;
using inv::Form;
using inv::Invariant;
using inv::Term;
using trace::Point;
using trace::SnapKind;
using trace::TraceRecord;
using trace::ValueSnapshot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- snapshot helpers ----

ValueSnapshot snap_int(const std::string& path, int64_t v) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::Int;
  s.int_value = v;
  return s;
}
ValueSnapshot snap_float(const std::string& path, double v) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::Float;
  s.float_value = v;
  return s;
}
ValueSnapshot snap_str(const std::string& path, const std::string& v) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::String;
  s.string_value = v;
  return s;
}
ValueSnapshot snap_null(const std::string& path) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::Null;
  return s;
}
ValueSnapshot snap_obj(const std::string& path, uint64_t id) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::Object;
  s.object_id = id;
  return s;
}
ValueSnapshot snap_arr(const std::string& path, std::vector<ValueSnapshot> elems) {
  ValueSnapshot s;
  s.path = path;
  s.kind = SnapKind::Array;
  s.elements = std::move(elems);
  return s;
}

TraceRecord make_record(Point point, std::vector<ValueSnapshot> vars,
                        const std::string& test = "test_t", uint64_t call_index = 1) {
  TraceRecord r;
  r.test = test;
  r.method = "m";
  r.point = point;
  r.call_index = call_index;
  r.vars = std::move(vars);
  return r;
}

TraceRecord random_record(Lcg64& rng) {
  static const char* paths[] = {"p", "q", "p.f", "a", "b"};
  TraceRecord r;
  r.test = "test_t";
  r.method = "m";
  r.point = rng.next_below(2) ? Point::Exit : Point::Entry;
  r.call_index = 1 + rng.next_below(50);
  std::set<std::string> used;
  size_t nvars = 1 + rng.next_below(5);
  for (size_t i = 0; i < nvars; ++i) {
    std::string path = paths[rng.next_below(5)];
    if (r.point == Point::Exit && rng.next_below(3) == 0) path = "orig(" + path + ")";
    if (!used.insert(path).second) continue;
    switch (rng.next_below(6)) {
      case 0: r.vars.push_back(snap_int(path, (int64_t)rng.next_range(-20, 20))); break;
      case 1: r.vars.push_back(snap_float(path, (double)rng.next_range(-40, 40) / 2.0)); break;
      case 2: r.vars.push_back(snap_str(path, rng.next_below(2) ? "x" : "yy")); break;
      case 3: r.vars.push_back(snap_obj(path, rng.next_below(4))); break;
      case 4: {
        std::vector<ValueSnapshot> elems;
        size_t len = rng.next_below(4);
        uint64_t mode = rng.next_below(3);
        for (size_t e = 0; e < len; ++e) {
          if (rng.next_below(4) == 0) {
            elems.push_back(snap_null(""));
          } else if (mode == 0) {
            elems.push_back(snap_int("", (int64_t)rng.next_range(-10, 10)));
          } else if (mode == 1) {
            elems.push_back(snap_str("", rng.next_below(2) ? "x" : "yy"));
          } else {
            elems.push_back(snap_obj("", rng.next_below(4)));
          }
        }
        r.vars.push_back(snap_arr(path, std::move(elems)));
        break;
      }
      default: r.vars.push_back(snap_null(path)); break;
    }
  }
  if (r.point == Point::Exit && !r.find("return"))
    r.vars.push_back(snap_int("return", (int64_t)rng.next_range(-20, 20)));
  return r;
}

trace::SplitTraces wrap_records(std::vector<TraceRecord> records) {
  trace::SplitTraces st;
  for (const auto& r : records) st.tests.insert(r.test);
  st.records = std::move(records);
  return st;
}

// ---- corpus pipeline helpers (criteria 7 and 8) ----

struct ProjectRun {
  std::string name;
  minilang::Program prog;
  std::vector<labeler::LabeledInvariant> labeled;
};

bool run_project(const corpusgen::GeneratedProject& p, int splits, double fraction,
                 uint64_t seed, ProjectRun& out, std::string& err) {
  out.name = p.name;
  out.prog = minilang::parse(p.core_source + "\n" + p.tests_source);
  for (const auto& fn : out.prog.functions)
    if (!out.prog.tests.count(fn.name)) out.prog.core.insert(fn.name);

  std::map<std::string, std::vector<TraceRecord>> per_test;
  for (const std::string& t : out.prog.tests) {
    minilang::CollectingSink sink;
    auto report = minilang::run_tests(out.prog, {t}, sink, seed);
    if (report.failures() > 0) {
      err = p.name + ": test " + t + " failed";
      return false;
    }
    per_test[t] = std::move(sink.records);
  }
  auto plan = labeler::make_splits(out.prog.tests, splits, fraction, seed);
  inv::InferenceConfig icfg;
  out.labeled = labeler::label_corpus(per_test, plan, icfg, 10);
  return true;
}

std::vector<graphs::MethodGraph> project_graphs(const ProjectRun& pr, bool invariant_only) {
  std::map<std::string, graphs::MethodGraph> base;
  if (!invariant_only)
    for (const auto& fn : pr.prog.functions)
      if (pr.prog.core.count(fn.name))
        base.emplace(fn.name, graphs::build_graph(fn.ast, fn.name, pr.name));
  std::vector<graphs::MethodGraph> out;
  for (const auto& li : pr.labeled) {
    graphs::MethodGraph g = invariant_only
                                ? graphs::invariant_graph(li.invariant, pr.name)
                                : graphs::inject_invariant(base.at(li.invariant.method),
                                                           li.invariant);
    g.label = li.valid;
    out.push_back(std::move(g));
  }
  return out;
}

double pooled_auc(const model::Checkpoint& ck, const std::vector<graphs::MethodGraph>& gs) {
  std::vector<double> scores = model::predict(ck, gs);
  std::vector<int> labels;
  for (const auto& g : gs) labels.push_back(*g.label ? 1 : 0);
  return metrics::roc(scores, labels).auc;
}

double per_method_mean_auc(const model::Checkpoint& ck,
                           const std::vector<graphs::MethodGraph>& gs, size_t& groups,
                           size_t& skipped) {
  std::vector<double> scores = model::predict(ck, gs);
  std::vector<metrics::ScoredInvariant> items;
  for (size_t i = 0; i < gs.size(); ++i)
    items.push_back({gs[i].project + "/" + gs[i].method, scores[i], *gs[i].label ? 1 : 0});
  auto eval = metrics::per_method_eval(items);
  groups = eval.per_group.size();
  skipped = eval.skipped;
  return eval.mean_auc;
}

// ---- criterion 1 ----

Outcome criterion_split_scores() {
  auto t0 = Clock::now();
  std::map<std::string, std::vector<TraceRecord>> per_test;
  labeler::SplitPlan plan;
  plan.n_splits = 25;
  plan.fraction = 0.04;
  plan.seed = 0;
  for (int i = 0; i < 25; ++i) {
    std::string test = fmt("test_s%02d", i);
    int64_t low = i < 20 ? 0 : 1;  // 20 splits see val >= 0, 5 see val >= 1
    std::vector<TraceRecord> records;
    for (uint64_t call = 1; call <= 6; ++call) {
      int64_t v = call % 2 == 1 ? low : 3;
      records.push_back(make_record(Point::Entry, {snap_int("val", v)}, test, call));
    }
    per_test[test] = std::move(records);
    plan.splits.push_back({test});
  }

  inv::InferenceConfig cfg;
  auto labeled = labeler::label_corpus(per_test, plan, cfg, 10);

  const labeler::LabeledInvariant* ge0 = nullptr;
  const labeler::LabeledInvariant* ge1 = nullptr;
  Invariant want0 = Invariant::num(Form::NumGe, "m", Point::Entry, Term::var("val"), 0);
  Invariant want1 = Invariant::num(Form::NumGe, "m", Point::Entry, Term::var("val"), 1);
  for (const auto& li : labeled) {
    if (li.invariant == want0) ge0 = &li;
    if (li.invariant == want1) ge1 = &li;
  }
  double elapsed = seconds_since(t0);
  if (!ge0 || !ge1)
    return {false, "candidate val>=0 or val>=1 missing from labeled output"};
  bool pass = ge1->score == 0.2 && !ge1->valid && ge1->supporting_splits == 5 &&
              ge1->covering_splits == 25 && ge0->score == 1.0 && ge0->valid && elapsed < 1.0;
  return {pass, fmt("score(val>=1)=%.3f label=%s 5/25, score(val>=0)=%.3f label=%s, %.3fs",
                    ge1->score, ge1->valid ? "valid" : "invalid", ge0->score,
                    ge0->valid ? "valid" : "invalid", elapsed)};
}

// ---- criterion 2 ----

Outcome criterion_call_sampling() {
  const char* source = R"(
fn bump(x) {
  return x + 1;
}

fn test_loop() {
  i = 0;
  while (i < 2500) {
    bump(i);
    i = i + 1;
  }
}
)";
  minilang::Program prog = minilang::parse(source);
  prog.core.insert("bump");
  minilang::CollectingSink sink;
  auto report = minilang::run_tests(prog, {"test_loop"}, sink, 0);
  if (report.failures() != 0) return {false, "test_loop failed"};

  std::set<uint64_t> expected;
  for (uint64_t i = 1; i <= 10; ++i) expected.insert(i);
  for (uint64_t i = 20; i <= 100; i += 10) expected.insert(i);
  for (uint64_t i = 200; i <= 1000; i += 100) expected.insert(i);
  expected.insert(2000);

  std::set<uint64_t> entries, exits;
  for (const auto& r : sink.records)
    (r.point == Point::Entry ? entries : exits).insert(r.call_index);
  bool pass = entries == expected && exits == expected;
  return {pass, fmt("2500 calls traced at %zu indices (expected %zu), entry==exit sets %s",
                    entries.size(), expected.size(), entries == exits ? "match" : "differ")};
}

// ---- criterion 3 ----

Outcome criterion_implication_soundness() {
  auto t0 = Clock::now();
  Lcg64 rng(414243);

  // A rich candidate pool per point, enumerated once over random schemas.
  std::array<std::vector<Invariant>, 2> pools;
  for (int pt = 0; pt < 2; ++pt) {
    Point point = pt ? Point::Exit : Point::Entry;
    std::vector<TraceRecord> batch;
    for (int i = 0; i < 60; ++i) {
      TraceRecord r = random_record(rng);
      r.point = point;
      if (point == Point::Exit && !r.find("return"))
        r.vars.push_back(snap_int("return", 1));
      batch.push_back(std::move(r));
    }
    std::vector<const TraceRecord*> ptrs;
    for (const auto& r : batch) ptrs.push_back(&r);
    pools[pt] = inv::enumerate_candidates(inv::build_schema(ptrs, "m", point));
  }
  if (pools[0].size() < 100 || pools[1].size() < 100)
    return {false, "candidate pools unexpectedly small"};

  size_t snapshots = 0, checked = 0, violations = 0;
  while (snapshots < 100000) {
    TraceRecord r = random_record(rng);
    ++snapshots;
    const auto& pool = pools[r.point == Point::Exit ? 1 : 0];
    std::array<const Invariant*, 40> cand;
    for (auto& c : cand) c = &pool[rng.next_below(pool.size())];
    for (const Invariant* j : cand) {
      bool premise_checked = false, premise = false;
      for (const Invariant* i : cand) {
        if (i == j || !inv::implies(*j, *i)) continue;
        if (!premise_checked) {
          premise = inv::evaluate(*j, r);
          premise_checked = true;
        }
        ++checked;
        if (premise && !inv::evaluate(*i, r)) ++violations;
      }
    }
  }
  double elapsed = seconds_since(t0);
  bool pass = violations == 0 && elapsed < 60.0;
  return {pass, fmt("%zu snapshots, %zu implied-pair checks, %zu violations, %.1fs", snapshots,
                    checked, violations, elapsed)};
}

// ---- criterion 4 ----

std::vector<Invariant> oracle_infer(const std::vector<TraceRecord>& records,
                                    const std::string& method, Point point,
                                    const inv::InferenceConfig& cfg) {
  std::vector<const TraceRecord*> mine;
  for (const TraceRecord& r : records)
    if (r.method == method && r.point == point) mine.push_back(&r);
  if (mine.size() < (size_t)cfg.min_support) return {};
  inv::Schema schema = inv::build_schema(mine, method, point);
  std::vector<Invariant> holding;
  for (const Invariant& cand : inv::enumerate_candidates(schema)) {
    bool ok = true;
    for (const TraceRecord* r : mine) ok = ok && inv::evaluate(cand, *r);
    if (ok) holding.push_back(cand);
  }
  std::vector<Invariant> out;
  for (const Invariant& i : holding) {
    bool maximal = true;
    for (const Invariant& j : holding)
      if (!(j == i) && inv::implies(j, i)) maximal = false;
    if (maximal) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome criterion_inference_oracle() {
  Lcg64 rng(515253);
  size_t invariants_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng.next_below(50);
    Point point = rng.next_below(2) ? Point::Exit : Point::Entry;
    std::vector<TraceRecord> records;
    for (size_t i = 0; i < n; ++i) {
      TraceRecord r = random_record(rng);
      r.point = point;
      if (point == Point::Exit && !r.find("return"))
        r.vars.push_back(snap_int("return", 1));
      records.push_back(std::move(r));
    }
    inv::InferenceConfig cfg;
    cfg.min_support = 1 + (int)rng.next_below(8);
    auto got = inv::infer(wrap_records(records), "m", point, cfg);
    auto want = oracle_infer(records, "m", point, cfg);
    if (got != want)
      return {false, fmt("trial %d: infer returned %zu invariants, oracle %zu", trial,
                         got.size(), want.size())};
    invariants_seen += got.size();
  }
  return {true, fmt("200 trials equal, %zu invariants compared", invariants_seen)};
}

// ---- criterion 5 ----

double mann_whitney(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  size_t pos = 0, neg = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++pos;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (int l : labels) neg += l == 0;
  return wins / ((double)pos * (double)neg);
}

Outcome criterion_roc() {
  Lcg64 rng(616263);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 2 + rng.next_below(198);
    std::vector<double> scores;
    std::vector<int> labels;
    for (size_t i = 0; i < n; ++i) {
      // Quantized half the time so tie handling is exercised.
      scores.push_back(rng.next_below(2) ? (double)rng.next_below(20) / 19.0 : rng.next_unit());
      labels.push_back((int)rng.next_below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    double got = metrics::roc(scores, labels).auc;
    double want = mann_whitney(scores, labels);
    worst = std::max(worst, std::abs(got - want));
  }
  if (worst >= 1e-9) return {false, fmt("MW deviation %.3g >= 1e-9", worst)};

  std::vector<double> scores;
  std::vector<int> labels;
  Lcg64 rng2(717273);
  for (int i = 0; i < 10000; ++i) {
    scores.push_back(rng2.next_unit());
    labels.push_back((int)rng2.next_below(2));
  }
  double random_auc = metrics::roc(scores, labels).auc;
  if (std::abs(random_auc - 0.5) > 0.02)
    return {false, fmt("random-score AUC %.4f outside 0.5 +/- 0.02", random_auc)};

  metrics::RocCurve diagonal = metrics::roc({0.5, 0.5}, {0, 1});
  double partial = metrics::partial_auc(diagonal, 0.25);
  bool exact = partial == 0.03125;
  return {exact, fmt("MW deviation %.2g, random AUC %.4f, diagonal partial@0.25 = %.6f%s", worst,
                     random_auc, partial, exact ? " (exact)" : " (not exact)")};
}

// ---- criterion 6 ----

const char* kGradMethods = R"(
fn widen(a, b) {
  if (a < b) {
    return b - a;
  }
  return a - b;
}

fn label_of(node) {
  if (node == null) {
    return "none";
  }
  return node.tag;
}

fn tally(bag, n) {
  bag.amount = bag.amount + n;
  return bag.amount;
}
)";

Invariant random_invariant(Lcg64& rng, const std::string& method) {
  if (method == "widen") {
    switch (rng.next_below(3)) {
      case 0: return Invariant::num(Form::NumGe, method, Point::Entry, Term::var("a"), 0);
      case 1:
        return Invariant::rel(method, Point::Entry, Term::var("a"), inv::RelOp::Le,
                              Term::var("b"));
      default:
        return Invariant::rel(method, Point::Exit, Term::ret(), inv::RelOp::Ge, Term::var("a"));
    }
  }
  if (method == "label_of") {
    switch (rng.next_below(3)) {
      case 0: return Invariant::not_null(method, Point::Entry, Term::var("node"));
      case 1: return Invariant::str_eq(method, Point::Exit, Term::var("node.tag"), "leaf");
      default: return Invariant::not_null(method, Point::Exit, Term::ret());
    }
  }
  switch (rng.next_below(3)) {
    case 0:
      return Invariant::rel(method, Point::Exit, Term::ret(), inv::RelOp::Eq,
                            Term::var("bag.amount"));
    case 1: return Invariant::num(Form::NumGe, method, Point::Entry, Term::var("n"), 1);
    default: return Invariant::not_null(method, Point::Entry, Term::var("bag"));
  }
}

double worst_rel_error(model::ParamPack& params, const model::ParamPack& grads,
                       const std::function<double()>& loss_at) {
  const double h = 1e-4;
  double worst = 0.0;
  auto& flat = params.flat();
  const auto& g = grads.flat();
  for (size_t i = 0; i < flat.size(); ++i) {
    double keep = flat[i];
    flat[i] = keep + h;
    double lp = loss_at();
    flat[i] = keep - h;
    double lm = loss_at();
    flat[i] = keep;
    double fd = (lp - lm) / (2.0 * h);
    if (std::abs(g[i]) <= 1e-6 && std::abs(fd) <= 1e-6) continue;
    double denom = std::max(std::abs(g[i]), std::abs(fd));
    worst = std::max(worst, std::abs(g[i] - fd) / denom);
  }
  return worst;
}

Outcome criterion_gradients() {
  Lcg64 rng(818283);
  minilang::Program prog = minilang::parse(kGradMethods);
  const char* names[] = {"widen", "label_of", "tally"};

  auto draw_graphs = [&](bool invariant_only) {
    std::vector<graphs::MethodGraph> gs;
    for (int i = 0; i < 4; ++i) {
      std::string method = names[rng.next_below(3)];
      Invariant ivt = random_invariant(rng, method);
      if (invariant_only) {
        gs.push_back(graphs::invariant_graph(ivt, "demo"));
      } else {
        const auto* fn = prog.find(method);
        gs.push_back(graphs::inject_invariant(graphs::build_graph(fn->ast, method, "demo"), ivt));
      }
      gs.back().label = rng.next_below(2) != 0;
    }
    gs[0].label = true;
    gs[1].label = false;
    return gs;
  };
  auto ptrs = [](const std::vector<graphs::MethodGraph>& gs) {
    std::vector<const graphs::MethodGraph*> out;
    for (const auto& g : gs) out.push_back(&g);
    return out;
  };

  model::GgnnConfig gcfg;
  gcfg.hidden_dim = 8;
  gcfg.steps = 8;
  gcfg.head_hidden = 8;

  double worst_ggnn, worst_nc, worst_rnn;
  {
    auto gs = draw_graphs(false);
    auto vocab = graphs::build_vocab(gs);
    model::ParamPack params = model::make_ggnn_params(vocab, gcfg);
    params.init_xavier(rng.next_u64());
    model::GraphBatch batch = model::build_batch(ptrs(gs), vocab, true);
    model::ParamPack grads = params.zeros_like();
    model::ggnn_loss_grad(batch, params, gcfg, grads);
    worst_ggnn =
        worst_rel_error(params, grads, [&] { return model::ggnn_loss(batch, params, gcfg); });
  }
  {
    auto gs = draw_graphs(true);
    auto vocab = graphs::build_vocab(gs);
    model::ParamPack params = model::make_ggnn_params(vocab, gcfg);
    params.init_xavier(rng.next_u64());
    model::GraphBatch batch = model::build_batch(ptrs(gs), vocab, true);
    model::ParamPack grads = params.zeros_like();
    model::ggnn_loss_grad(batch, params, gcfg, grads);
    worst_nc =
        worst_rel_error(params, grads, [&] { return model::ggnn_loss(batch, params, gcfg); });
  }
  {
    auto gs = draw_graphs(false);
    auto vocab = graphs::build_vocab(gs);
    model::RnnConfig rcfg;
    rcfg.embedding_dim = 6;
    rcfg.state_dim = 5;
    rcfg.head_hidden = 7;
    model::ParamPack params = model::make_rnn_params(vocab, rcfg);
    params.init_xavier(rng.next_u64());
    std::vector<model::TokenPair> pairs;
    for (const auto& g : gs) pairs.push_back(model::token_pair(g));
    std::vector<const model::TokenPair*> batch;
    for (const auto& p : pairs) batch.push_back(&p);
    model::ParamPack grads = params.zeros_like();
    model::rnn_loss_grad(batch, params, vocab, rcfg, grads);
    worst_rnn = worst_rel_error(
        params, grads, [&] { return model::rnn_loss(batch, params, vocab, rcfg); });
  }
  bool pass = worst_ggnn < 1e-4 && worst_nc < 1e-4 && worst_rnn < 1e-4;
  return {pass, fmt("worst relative error: ggnn %.2e, no-context %.2e, rnn %.2e", worst_ggnn,
                    worst_nc, worst_rnn)};
}

// ---- criterion 7 ----

Outcome criterion_context_sensitivity() {
  auto t0 = Clock::now();
  corpusgen::GenConfig gen;
  gen.n_projects = 8;
  gen.methods_per_project = 36;
  gen.tests_per_method = 12;
  gen.weights = {{"guard", 1.0}};
  gen.coverage.profile = "full";
  gen.seed = 1;
  corpusgen::Corpus corpus = corpusgen::generate(gen);

  std::vector<ProjectRun> runs(corpus.projects.size());
  size_t total_labeled = 0;
  for (size_t i = 0; i < corpus.projects.size(); ++i) {
    std::string err;
    if (!run_project(corpus.projects[i], 25, 0.3, 11, runs[i], err)) return {false, err};
    total_labeled += runs[i].labeled.size();
  }
  if (total_labeled < 2000)
    return {false, fmt("only %zu labeled invariants (need >= 2000)", total_labeled)};

  auto split_graphs = [&](bool invariant_only) {
    std::pair<std::vector<graphs::MethodGraph>, std::vector<graphs::MethodGraph>> out;
    for (size_t i = 0; i < runs.size(); ++i) {
      auto gs = project_graphs(runs[i], invariant_only);
      auto& side = i + 2 >= runs.size() ? out.second : out.first;
      for (auto& g : gs) side.push_back(std::move(g));
    }
    return out;
  };

  std::string ckpt_dir = "acc_tmp_c7";
  std::filesystem::remove_all(ckpt_dir);
  model::GgnnConfig gcfg;  // paper-scale defaults: 128 hidden, 8 steps, 3 epochs
  gcfg.seed = 11;
  model::RnnConfig rcfg;
  rcfg.seed = 11;

  auto [train_full, test_full] = split_graphs(false);
  auto vocab_note = fmt("%zu train / %zu test graphs", train_full.size(), test_full.size());
  auto full_vocab = graphs::build_vocab(train_full);
  auto full = model::train(model::ModelKind::Ggnn, train_full, full_vocab, gcfg, rcfg, ckpt_dir);
  std::vector<double> epoch_auc;
  for (const std::string& path : full.checkpoint_paths)
    epoch_auc.push_back(pooled_auc(model::load_checkpoint(path), test_full));
  double best = *std::max_element(epoch_auc.begin(), epoch_auc.end());

  auto [train_inv, test_inv] = split_graphs(true);
  auto nc_vocab = graphs::build_vocab(train_inv);
  auto nc = model::train(model::ModelKind::NoContext, train_inv, nc_vocab, gcfg, rcfg, "");
  double nc_auc = pooled_auc(nc.checkpoint, test_inv);

  std::filesystem::remove_all(ckpt_dir);
  double elapsed = seconds_since(t0);
  std::ostringstream aucs;
  for (size_t e = 0; e < epoch_auc.size(); ++e)
    aucs << (e ? " " : "") << fmt("%.3f", epoch_auc[e]);
  bool pass = total_labeled >= 2000 && best >= 0.85 && std::abs(nc_auc - 0.5) <= 0.05 &&
              elapsed < 1800.0;
  return {pass, fmt("%zu labeled, %s, ggnn AUC by epoch [%s], no-context %.3f, %.0fs",
                    total_labeled, vocab_note.c_str(), aucs.str().c_str(), nc_auc, elapsed)};
}

// ---- criterion 8 ----

Outcome criterion_intra_vs_cross() {
  auto t0 = Clock::now();
  corpusgen::GenConfig gen;
  gen.n_projects = 6;
  gen.methods_per_project = 10;
  gen.tests_per_method = 8;
  gen.weights = {{"guard", 1.0}, {"abs", 1.0}, {"clamp", 1.0}, {"counter", 1.0}};
  gen.coverage.profile = "sparse";
  gen.coverage.p = 0.5;
  gen.twin_copies = true;
  gen.seed = 5;
  corpusgen::Corpus corpus = corpusgen::generate(gen);

  std::vector<ProjectRun> runs(corpus.projects.size());
  for (size_t i = 0; i < corpus.projects.size(); ++i) {
    std::string err;
    if (!run_project(corpus.projects[i], 25, 0.3, 11, runs[i], err)) return {false, err};
  }

  // Core functions appear base methods first, twin copies second.
  auto twin_names = [](const ProjectRun& pr) {
    std::vector<std::string> core;
    for (const auto& fn : pr.prog.functions)
      if (pr.prog.core.count(fn.name)) core.push_back(fn.name);
    return std::set<std::string>(core.begin() + core.size() / 2, core.end());
  };

  model::GgnnConfig gcfg;
  gcfg.hidden_dim = 64;
  gcfg.head_hidden = 64;
  gcfg.seed = 11;
  model::RnnConfig rcfg;
  rcfg.seed = 11;

  auto train_eval = [&](const std::vector<graphs::MethodGraph>& train_gs,
                        const std::vector<graphs::MethodGraph>& eval_gs, size_t& groups,
                        size_t& skipped) {
    auto vocab = graphs::build_vocab(train_gs);
    auto r = model::train(model::ModelKind::Ggnn, train_gs, vocab, gcfg, rcfg, "");
    return per_method_mean_auc(r.checkpoint, eval_gs, groups, skipped);
  };

  // Both arms score the twin methods of the last two projects; they differ
  // only in whether those projects' base methods were available in training.
  std::vector<graphs::MethodGraph> cross_train, intra_train, eval_twins;
  for (size_t i = 0; i < runs.size(); ++i) {
    auto gs = project_graphs(runs[i], false);
    std::set<std::string> twins = twin_names(runs[i]);
    for (auto& g : gs) {
      if (i + 2 < runs.size()) {
        cross_train.push_back(g);
        intra_train.push_back(std::move(g));
      } else if (twins.count(g.method)) {
        eval_twins.push_back(std::move(g));
      } else {
        intra_train.push_back(std::move(g));
      }
    }
  }

  size_t cross_groups = 0, cross_skipped = 0, intra_groups = 0, intra_skipped = 0;
  double cross = train_eval(cross_train, eval_twins, cross_groups, cross_skipped);
  double intra = train_eval(intra_train, eval_twins, intra_groups, intra_skipped);
  double elapsed = seconds_since(t0);
  if (!(cross_groups >= 4) || !(intra_groups >= 4))
    return {false, fmt("too few methods with both classes: intra %zu, cross %zu", intra_groups,
                       cross_groups)};
  bool pass = intra - cross >= 0.05;
  return {pass,
          fmt("per-method mean AUC intra %.3f (%zu methods), cross %.3f (%zu methods), "
              "gap %.1f points, %.0fs",
              intra, intra_groups, cross, cross_groups, (intra - cross) * 100.0, elapsed)};
}

// ---- criterion 9 ----

// Routes stdout/stderr to /dev/null while alive so nested pipeline runs do
// not interleave with the acceptance report.
struct QuietFds {
  int saved_out = -1, saved_err = -1;
  QuietFds() {
    std::fflush(stdout);
    std::fflush(stderr);
    saved_out = dup(1);
    saved_err = dup(2);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) {
      dup2(devnull, 1);
      dup2(devnull, 2);
      close(devnull);
    }
  }
  ~QuietFds() {
    std::fflush(stdout);
    std::fflush(stderr);
    dup2(saved_out, 1);
    dup2(saved_err, 2);
    close(saved_out);
    close(saved_err);
  }
};

Outcome criterion_pipeline_determinism() {
  std::string config_path = FORGE_DEMO_CONFIG;
  Json cfg_json = read_json_file(config_path);
  cli::PipelineConfig cfg = cli::PipelineConfig::from_json(cfg_json, config_path);
  std::filesystem::remove_all(cfg.root);

  auto read_file = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };

  std::string summary;
  {
    QuietFds quiet;
    if (cli::dispatch({"pipeline", "--config", config_path}, &summary) != 0)
      return {false, "first pipeline run failed"};
  }
  std::string labeled1 = read_file(cfg.labels() + "/labeled.jsonl");
  std::string scores1 = read_file(cfg.eval() + "/scores.jsonl");
  if (labeled1.empty() || scores1.empty()) return {false, "first run produced empty artifacts"};

  {
    QuietFds quiet;
    if (cli::dispatch({"pipeline", "--config", config_path}, &summary) != 0)
      return {false, "second pipeline run failed"};
  }
  std::string labeled2 = read_file(cfg.labels() + "/labeled.jsonl");
  std::string scores2 = read_file(cfg.eval() + "/scores.jsonl");
  std::filesystem::remove_all(cfg.root);

  bool pass = labeled1 == labeled2 && scores1 == scores2;
  return {pass, fmt("labeled.jsonl %zu bytes %s, scores.jsonl %zu bytes %s", labeled1.size(),
                    labeled1 == labeled2 ? "identical" : "DIFFER", scores1.size(),
                    scores1 == scores2 ? "identical" : "DIFFER")};
}

// ---- criterion 10 ----

Outcome criterion_split_coverage() {
  auto t0 = Clock::now();
  std::set<std::string> tests;
  for (int i = 0; i < 100; ++i) tests.insert(fmt("t%02d", i));

  const int plans = 1000000;
  uint64_t never = 0;
  std::array<bool, 100> hit{};
  for (int p = 0; p < plans; ++p) {
    auto plan = labeler::make_splits(tests, 100, 0.1, 0x5eed0000ULL + (uint64_t)p);
    hit.fill(false);
    for (const auto& split : plan.splits)
      for (const std::string& t : split) hit[(t[1] - '0') * 10 + (t[2] - '0')] = true;
    for (bool h : hit) never += !h;
  }
  double estimate = (double)never / ((double)plans * 100.0);
  double elapsed = seconds_since(t0);
  bool pass = estimate < 3e-5;
  return {pass, fmt("%llu never-selected of 1e8 test-plan pairs, estimate %.3g < 3e-5, %.0fs",
                    (unsigned long long)never, estimate, elapsed)};
}

struct Entry {
  int number;
  const char* name;
  Outcome (*fn)();
};

const Entry kCriteria[] = {
    {1, "split cross-validation scores", criterion_split_scores},
    {2, "call sampling back-off", criterion_call_sampling},
    {3, "implication soundness", criterion_implication_soundness},
    {4, "inference oracle equivalence", criterion_inference_oracle},
    {5, "roc and partial auc", criterion_roc},
    {6, "gradient checks", criterion_gradients},
    {7, "context sensitivity benchmark", criterion_context_sensitivity},
    {8, "intra vs cross project gap", criterion_intra_vs_cross},
    {9, "pipeline determinism", criterion_pipeline_determinism},
    {10, "split coverage", criterion_split_coverage},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Entry& entry : kCriteria) {
    if (!selected.empty() && !selected.count(entry.number)) continue;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("ACCEPT %02d %s: %s (%s)\n", entry.number, entry.name,
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
