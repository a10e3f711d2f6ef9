#include "forge/cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>

#include "CLI11.hpp"
#include "forge/corpusgen/corpusgen.hpp"
#include "forge/error.hpp"
#include "forge/graphs/graph.hpp"
#include "forge/invariants/infer.hpp"
#include "forge/jsonl.hpp"
#include "forge/labeler/label.hpp"
#include "forge/metrics/metrics.hpp"
#include "forge/minilang/interp.hpp"
#include "forge/minilang/parser.hpp"
#include "forge/model/train.hpp"
#include "forge/trace/io.hpp"
#include "forge/trace/record.hpp"

namespace fs = std::filesystem;

namespace forge::cli {

namespace {

void log(const std::string& line) { std::cerr << line << "\n"; }

std::string join_path(const std::string& a, const std::string& b) {
  return (fs::path(a) / b).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ForgeError("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::optional<uint64_t> env_seed() {
  const char* s = std::getenv("FORGE_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  uint64_t v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') throw ForgeError("FORGE_SEED must be an unsigned integer");
  return v;
}

uint64_t resolve_seed(bool flag_given, uint64_t flag_value, bool config_given,
                      uint64_t config_value) {
  if (flag_given) return flag_value;
  if (config_given) return config_value;
  if (auto e = env_seed()) return *e;
  return 0;
}

std::regex glob_regex(const std::string& glob) {
  std::string re;
  for (char c : glob) {
    if (c == '*') {
      re += ".*";
    } else if (c == '?') {
      re += '.';
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      re += c;
    } else {
      re += '\\';
      re += c;
    }
  }
  return std::regex(re);
}

// ---- shared stages ----

minilang::Program load_program(const std::vector<std::string>& files,
                               const std::vector<std::string>& core_names) {
  std::string text;
  for (const std::string& f : files) text += read_file(f) + "\n";
  minilang::Program prog = minilang::parse(text);
  if (core_names.empty()) {
    for (const auto& fn : prog.functions)
      if (!prog.tests.count(fn.name)) prog.core.insert(fn.name);
  } else {
    for (const std::string& name : core_names) {
      if (!prog.find(name)) throw ForgeError("core function '" + name + "' not found");
      prog.core.insert(name);
    }
  }
  return prog;
}

std::vector<std::string> project_sources(const std::string& corpus_dir,
                                         const std::string& project) {
  std::vector<std::string> files;
  for (const char* sub : {"src", "tests"}) {
    fs::path dir = fs::path(corpus_dir) / project / sub;
    if (!fs::is_directory(dir)) throw ForgeError("missing directory '" + dir.string() + "'");
    std::vector<std::string> here;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".mini") here.push_back(entry.path().string());
    std::sort(here.begin(), here.end());
    files.insert(files.end(), here.begin(), here.end());
  }
  if (files.empty()) throw ForgeError("no .mini sources for project '" + project + "'");
  return files;
}

struct TraceStats {
  size_t tests = 0;
  size_t failures = 0;
  size_t records = 0;
};

// Each test runs in its own interpreter invocation, so call counters and
// the sampling back-off restart per test; records land in <dir>/<test>.trace.
TraceStats run_and_trace(const minilang::Program& prog, const std::set<std::string>& selected,
                         const std::string& out_dir, uint64_t seed) {
  fs::create_directories(out_dir);
  TraceStats st;
  for (const std::string& t : selected) {
    minilang::CollectingSink sink;
    auto report = minilang::run_tests(prog, {t}, sink, seed);
    st.tests += 1;
    st.failures += report.failures();
    for (const auto& r : report.results)
      if (!r.passed) log("test failed: " + r.test + ": " + r.error);
    trace::write_records(join_path(out_dir, t + ".trace"), sink.records);
    st.records += sink.records.size();
  }
  return st;
}

std::map<std::string, std::vector<trace::TraceRecord>> read_trace_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ForgeError("trace directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".trace") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ForgeError("no .trace files in '" + dir + "'");
  std::map<std::string, std::vector<trace::TraceRecord>> per_test;
  for (const fs::path& p : files) per_test[p.stem().string()] = trace::read_records(p.string());
  return per_test;
}

struct LabelArgs {
  int splits = 100;
  double fraction = 0.10;
  uint64_t seed = 0;
  int min_splits = 10;
  int min_support = 5;
};

std::pair<std::vector<labeler::LabeledInvariant>, labeler::LabelSummary> label_stage(
    const std::map<std::string, std::vector<trace::TraceRecord>>& per_test,
    const LabelArgs& args) {
  std::set<std::string> tests;
  for (const auto& [name, records] : per_test) tests.insert(name);
  auto plan = labeler::make_splits(tests, args.splits, args.fraction, args.seed);
  inv::InferenceConfig icfg;
  icfg.min_support = args.min_support;
  labeler::LabelSummary summary;
  auto labeled = labeler::label_corpus(per_test, plan, icfg, args.min_splits, &summary);
  return {std::move(labeled), summary};
}

struct GraphStats {
  size_t graphs = 0;
  size_t skipped = 0;
};

// One row per labeled invariant: the method graph with the invariant
// grafted in (or the bare invariant graph), plus the invariant itself so
// downstream joins don't depend on row order.
GraphStats graph_stage(const std::vector<labeler::LabeledInvariant>& labeled,
                       const minilang::Program& prog, const std::string& project,
                       bool invariant_only, const std::string& out_file) {
  std::map<std::string, graphs::MethodGraph> base;
  if (!invariant_only)
    for (const auto& fn : prog.functions)
      if (prog.core.count(fn.name))
        base.emplace(fn.name, graphs::build_graph(fn.ast, fn.name, project));

  GraphStats st;
  std::vector<Json> rows;
  for (const auto& li : labeled) {
    graphs::MethodGraph g;
    if (invariant_only) {
      g = graphs::invariant_graph(li.invariant, project);
    } else {
      auto it = base.find(li.invariant.method);
      if (it == base.end())
        throw ForgeError("labeled invariant names unknown method '" + li.invariant.method + "'");
      try {
        g = graphs::inject_invariant(it->second, li.invariant);
      } catch (const graphs::MethodTooLarge&) {
        ++st.skipped;
        log("skipping oversized graph for " + li.invariant.render());
        continue;
      }
    }
    g.label = li.valid;
    g.score = li.score;
    Json row = g.to_json();
    row["inv"] = li.invariant.to_json();
    row["render"] = li.invariant.render();
    rows.push_back(std::move(row));
    ++st.graphs;
  }
  if (fs::path(out_file).has_parent_path()) fs::create_directories(fs::path(out_file).parent_path());
  write_jsonl(out_file, rows);
  return st;
}

std::vector<std::string> graph_files_in(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ForgeError("graph directory '" + dir + "' does not exist");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ForgeError("no .jsonl graph files in '" + dir + "'");
  return files;
}

void read_graph_rows(const std::vector<std::string>& files, std::vector<graphs::MethodGraph>& out,
                     std::vector<Json>* raw) {
  for (const std::string& f : files) {
    read_jsonl(f, [&](size_t line, const Json& v) {
      out.push_back(graphs::MethodGraph::from_json(v, f + ":" + std::to_string(line)));
      if (raw) raw->push_back(v);
    });
  }
}

model::ModelKind parse_model_kind(const std::string& name) {
  if (name == "ggnn") return model::ModelKind::Ggnn;
  if (name == "rnn") return model::ModelKind::Rnn;
  if (name == "nocontext" || name == "no_context") return model::ModelKind::NoContext;
  throw ForgeError("unknown model '" + name + "' (expected ggnn|rnn|nocontext)");
}

struct TrainOut {
  model::Checkpoint checkpoint;
  Json summary;
};

TrainOut train_stage(model::ModelKind kind, const std::vector<graphs::MethodGraph>& gs,
                     const model::GgnnConfig& gcfg, const model::RnnConfig& rcfg,
                     const std::string& out_dir) {
  auto vocab = graphs::build_vocab(gs);
  auto result = model::train(kind, gs, vocab, gcfg, rcfg, out_dir);
  std::string final_path = join_path(out_dir, "checkpoint.json");
  model::save_checkpoint(final_path, result.checkpoint);

  Json epochs = Json::array();
  for (const auto& e : result.epochs) epochs.push_back(e.mean_loss);
  Json summary = Json::object();
  summary["model"] = model::model_kind_name(kind);
  summary["graphs"] = gs.size();
  summary["epoch_losses"] = epochs;
  summary["final_epoch"] = result.checkpoint.epoch;
  summary["diverged"] = result.diverged;
  summary["checkpoint"] = final_path;
  return {std::move(result.checkpoint), std::move(summary)};
}

std::vector<Json> rank_stage(const model::Checkpoint& ckpt,
                             const std::vector<std::string>& graph_files,
                             const std::string& out_file) {
  std::vector<graphs::MethodGraph> gs;
  std::vector<Json> raw;
  read_graph_rows(graph_files, gs, &raw);
  std::vector<double> scores = model::predict(ckpt, gs);

  std::vector<Json> rows;
  rows.reserve(gs.size());
  for (size_t i = 0; i < gs.size(); ++i) {
    Json row = Json::object();
    row["project"] = gs[i].project;
    row["method"] = gs[i].method;
    if (raw[i].contains("inv")) row["inv"] = raw[i]["inv"];
    if (raw[i].contains("render")) row["render"] = raw[i]["render"];
    if (gs[i].label) row["label"] = *gs[i].label ? "valid" : "invalid";
    row["score"] = scores[i];
    rows.push_back(std::move(row));
  }
  if (fs::path(out_file).has_parent_path()) fs::create_directories(fs::path(out_file).parent_path());
  write_jsonl(out_file, rows);
  return rows;
}

// ---- eval ----

struct ScoreRow {
  std::string project;
  std::string method;
  std::string inv_key;  // serialized invariant, "" when the row has none
  double score = 0.0;
};

std::vector<ScoreRow> parse_score_rows(const std::vector<Json>& rows, const std::string& where) {
  std::vector<ScoreRow> out;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Json& v = rows[i];
    std::string at = where + " row " + std::to_string(i + 1);
    if (!v.is_object() || !v.contains("score") || !v["score"].is_number())
      throw FormatError(at, "score row needs a numeric 'score'");
    ScoreRow r;
    if (v.contains("project") && v["project"].is_string())
      r.project = v["project"].get<std::string>();
    if (v.contains("method") && v["method"].is_string()) r.method = v["method"].get<std::string>();
    if (v.contains("inv")) r.inv_key = v["inv"].dump();
    r.score = v["score"].get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

// Maps keyed by (project, invariant) with a project-free fallback so
// single-project files produced by the standalone subcommands still join.
struct LabelIndex {
  std::map<std::string, int> qualified;
  std::map<std::string, int> bare;

  void add(const std::string& project, const std::string& inv_key, int value) {
    qualified[project + "\x1f" + inv_key] = value;
    bare[inv_key] = value;
  }

  const int* find(const std::string& project, const std::string& inv_key) const {
    auto q = qualified.find(project + "\x1f" + inv_key);
    if (q != qualified.end()) return &q->second;
    auto b = bare.find(inv_key);
    if (b != bare.end()) return &b->second;
    return nullptr;
  }
};

LabelIndex load_label_index(const std::string& path) {
  LabelIndex index;
  read_jsonl(path, [&](size_t line, const Json& v) {
    std::string at = path + ":" + std::to_string(line);
    if (!v.is_object() || !v.contains("inv") || !v.contains("label") || !v["label"].is_string())
      throw FormatError(at, "labeled row needs 'inv' and a string 'label'");
    std::string label = v["label"].get<std::string>();
    if (label != "valid" && label != "invalid")
      throw FormatError(at, "label must be valid|invalid");
    std::string project;
    if (v.contains("project") && v["project"].is_string())
      project = v["project"].get<std::string>();
    index.add(project, v["inv"].dump(), label == "valid" ? 1 : 0);
  });
  return index;
}

// Golden annotation rows: {"project"?, "inv", "label": valid|invalid|irrelevant}.
LabelIndex load_golden_index(const std::string& path) {
  LabelIndex index;
  read_jsonl(path, [&](size_t line, const Json& v) {
    std::string at = path + ":" + std::to_string(line);
    if (!v.is_object() || !v.contains("inv") || !v.contains("label") || !v["label"].is_string())
      throw FormatError(at, "golden row needs 'inv' and a string 'label'");
    std::string label = v["label"].get<std::string>();
    if (label == "irrelevant") return;
    if (label != "valid" && label != "invalid")
      throw FormatError(at, "golden label must be valid|invalid|irrelevant");
    std::string project;
    if (v.contains("project") && v["project"].is_string())
      project = v["project"].get<std::string>();
    index.add(project, v["inv"].dump(), label == "valid" ? 1 : 0);
  });
  return index;
}

std::string fpr_key(double fpr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", fpr);
  return buf;
}

Json eval_stage(const std::vector<Json>& score_rows_json, const LabelIndex& labels,
                const LabelIndex* golden, bool per_method,
                const std::vector<double>& partial_fpr, const std::string& roc_out,
                const std::string& where) {
  auto score_rows = parse_score_rows(score_rows_json, where);
  if (score_rows.empty()) throw ForgeError("no score rows to evaluate");

  std::vector<double> scores;
  std::vector<int> labels_vec;
  std::vector<metrics::ScoredInvariant> per_method_items;
  std::vector<metrics::ScoredInvariant> per_project_items;
  size_t golden_matched = 0;
  std::vector<double> golden_scores;
  std::vector<int> golden_labels;

  for (const ScoreRow& r : score_rows) {
    if (r.inv_key.empty())
      throw ForgeError("score rows lack 'inv'; regenerate them with forge graph + forge rank");
    const int* noisy = labels.find(r.project, r.inv_key);
    if (!noisy)
      throw ForgeError("score row for " + r.project + "/" + r.method +
                       " has no matching labeled invariant");
    scores.push_back(r.score);
    labels_vec.push_back(*noisy);
    per_method_items.push_back({r.project + "/" + r.method, r.score, *noisy});
    per_project_items.push_back({r.project, r.score, *noisy});
    if (golden) {
      if (const int* truth = golden->find(r.project, r.inv_key)) {
        ++golden_matched;
        golden_scores.push_back(r.score);
        golden_labels.push_back(*truth);
      }
    }
  }

  Json summary = Json::object();
  summary["invariants"] = score_rows.size();
  bool pooled_both = false, seen_pos = false, seen_neg = false;
  for (int l : labels_vec) (l ? seen_pos : seen_neg) = true;
  pooled_both = seen_pos && seen_neg;
  if (pooled_both) {
    metrics::RocCurve curve = metrics::roc(scores, labels_vec);
    if (!roc_out.empty()) {
      if (fs::path(roc_out).has_parent_path())
        fs::create_directories(fs::path(roc_out).parent_path());
      metrics::write_roc_csv(roc_out, curve);
    }
    summary["auc"] = curve.auc;
    Json partial = Json::object();
    for (double f : partial_fpr) partial[fpr_key(f)] = metrics::partial_auc(curve, f);
    summary["partial_auc"] = partial;
  } else {
    summary["auc"] = nullptr;
    log("pooled labels are single-class; skipping pooled AUC");
  }

  if (per_method) {
    auto eval = metrics::per_method_eval(per_method_items);
    Json pm = Json::object();
    pm["mean_auc"] = eval.mean_auc;
    pm["methods"] = eval.per_group.size();
    pm["skipped"] = eval.skipped;
    summary["per_method"] = pm;
  }

  Json per_project = Json::object();
  for (const auto& [project, curve_p] : metrics::per_project_eval(per_project_items))
    per_project[project] = curve_p.auc;
  summary["per_project_auc"] = per_project;

  if (golden) {
    Json gj = Json::object();
    gj["matched"] = golden_matched;
    bool both = false, seen0 = false, seen1 = false;
    for (int l : golden_labels) (l ? seen1 : seen0) = true;
    both = seen0 && seen1;
    if (both) {
      metrics::RocCurve gc = metrics::roc(golden_scores, golden_labels);
      gj["auc"] = gc.auc;
      Json gp = Json::object();
      for (double f : partial_fpr) gp[fpr_key(f)] = metrics::partial_auc(gc, f);
      gj["partial_auc"] = gp;
    } else {
      gj["auc"] = nullptr;
      log("golden set has a single class among matched rows; skipping golden AUC");
    }
    summary["golden"] = gj;
  }
  if (pooled_both && !roc_out.empty()) summary["roc_out"] = roc_out;
  return summary;
}

}  // namespace

// ---- pipeline config ----

std::string PipelineConfig::corpus() const {
  return corpus_dir.empty() ? join_path(root, "corpus") : corpus_dir;
}
std::string PipelineConfig::traces() const {
  return trace_dir.empty() ? join_path(root, "traces") : trace_dir;
}
std::string PipelineConfig::labels() const {
  return labels_dir.empty() ? join_path(root, "labels") : labels_dir;
}
std::string PipelineConfig::graphs() const {
  return graphs_dir.empty() ? join_path(root, "graphs") : graphs_dir;
}
std::string PipelineConfig::checkpoints() const {
  return ckpt_dir.empty() ? join_path(root, "ckpt") : ckpt_dir;
}
std::string PipelineConfig::eval() const {
  return eval_dir.empty() ? join_path(root, "eval") : eval_dir;
}

void PipelineConfig::validate() const {
  if (splits < 1) throw ForgeError("labeler.splits must be positive");
  if (!(fraction > 0.0) || fraction > 1.0) throw ForgeError("labeler.fraction must be in (0, 1]");
  if (min_splits < 1) throw ForgeError("labeler.min_splits must be positive");
  if (min_support < 1) throw ForgeError("labeler.min_support must be positive");
  parse_model_kind(model);
  for (double f : partial_fpr)
    if (!(f > 0.0) || f > 1.0) throw ForgeError("eval.partial_fpr values must be in (0, 1]");
  if (generate && !gen.is_object()) throw ForgeError("generate section must be an object");
}

Json PipelineConfig::to_json() const {
  Json v = Json::object();
  Json paths = Json::object();
  paths["root"] = root;
  paths["corpus"] = corpus();
  paths["traces"] = traces();
  paths["labels"] = labels();
  paths["graphs"] = graphs();
  paths["checkpoints"] = checkpoints();
  paths["eval"] = eval();
  v["paths"] = paths;
  if (generate) v["generate"] = gen;
  Json lab = Json::object();
  lab["splits"] = splits;
  lab["fraction"] = fraction;
  lab["min_splits"] = min_splits;
  lab["min_support"] = min_support;
  v["labeler"] = lab;
  Json mod = model_settings.is_object() ? model_settings : Json::object();
  mod["kind"] = model;
  v["model"] = mod;
  Json ev = Json::object();
  ev["partial_fpr"] = partial_fpr;
  ev["per_method"] = per_method;
  ev["test_projects"] = test_projects;
  v["eval"] = ev;
  v["seed"] = seed;
  return v;
}

PipelineConfig PipelineConfig::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "pipeline config must be an object");
  PipelineConfig cfg;
  if (v.contains("paths")) {
    const Json& p = v["paths"];
    if (!p.is_object()) throw FormatError(where, "paths must be an object");
    auto get = [&](const char* f, std::string& out) {
      if (!p.contains(f)) return;
      if (!p[f].is_string()) throw FormatError(where, std::string("paths.") + f + " must be a string");
      out = p[f].get<std::string>();
    };
    get("root", cfg.root);
    get("corpus", cfg.corpus_dir);
    get("traces", cfg.trace_dir);
    get("labels", cfg.labels_dir);
    get("graphs", cfg.graphs_dir);
    get("checkpoints", cfg.ckpt_dir);
    get("eval", cfg.eval_dir);
  }
  if (v.contains("generate")) {
    if (!v["generate"].is_object()) throw FormatError(where, "generate must be an object");
    cfg.generate = true;
    cfg.gen = v["generate"];
  }
  if (v.contains("labeler")) {
    const Json& l = v["labeler"];
    if (!l.is_object()) throw FormatError(where, "labeler must be an object");
    auto get_int = [&](const char* f, int& out) {
      if (!l.contains(f)) return;
      if (!l[f].is_number_integer())
        throw FormatError(where, std::string("labeler.") + f + " must be an integer");
      out = l[f].get<int>();
    };
    get_int("splits", cfg.splits);
    get_int("min_splits", cfg.min_splits);
    get_int("min_support", cfg.min_support);
    if (l.contains("fraction")) {
      if (!l["fraction"].is_number()) throw FormatError(where, "labeler.fraction must be numeric");
      cfg.fraction = l["fraction"].get<double>();
    }
  }
  if (v.contains("model")) {
    const Json& m = v["model"];
    if (!m.is_object()) throw FormatError(where, "model must be an object");
    if (m.contains("kind")) {
      if (!m["kind"].is_string()) throw FormatError(where, "model.kind must be a string");
      cfg.model = m["kind"].get<std::string>();
    }
    cfg.model_settings = m;
    cfg.model_settings.erase("kind");
  }
  if (v.contains("eval")) {
    const Json& e = v["eval"];
    if (!e.is_object()) throw FormatError(where, "eval must be an object");
    if (e.contains("partial_fpr")) {
      if (!e["partial_fpr"].is_array()) throw FormatError(where, "eval.partial_fpr must be an array");
      cfg.partial_fpr.clear();
      for (const Json& f : e["partial_fpr"]) {
        if (!f.is_number()) throw FormatError(where, "eval.partial_fpr entries must be numeric");
        cfg.partial_fpr.push_back(f.get<double>());
      }
    }
    if (e.contains("per_method")) {
      if (!e["per_method"].is_boolean()) throw FormatError(where, "eval.per_method must be a boolean");
      cfg.per_method = e["per_method"].get<bool>();
    }
    if (e.contains("test_projects")) {
      if (!e["test_projects"].is_array())
        throw FormatError(where, "eval.test_projects must be an array");
      for (const Json& t : e["test_projects"]) {
        if (!t.is_string()) throw FormatError(where, "eval.test_projects entries must be strings");
        cfg.test_projects.push_back(t.get<std::string>());
      }
    }
  }
  if (v.contains("seed")) {
    if (!v["seed"].is_number_integer() && !v["seed"].is_number_unsigned())
      throw FormatError(where, "seed must be an integer");
    cfg.seed = v["seed"].get<uint64_t>();
    cfg.seed_from_config = true;
  }
  cfg.validate();
  return cfg;
}

namespace {

// ---- subcommand handlers ----

Json cmd_gen_corpus(const std::string& config_path, const std::string& out_dir, bool seed_given,
                    uint64_t seed) {
  Json raw = config_path.empty() ? Json::object() : read_json_file(config_path);
  corpusgen::GenConfig cfg = corpusgen::GenConfig::from_json(raw, config_path);
  bool cfg_has_seed = raw.is_object() && raw.contains("seed");
  cfg.seed = resolve_seed(seed_given, seed, cfg_has_seed, cfg.seed);
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  corpusgen::write_corpus(out_dir, corpus);

  size_t methods = 0, truth = 0;
  for (const auto& p : corpus.projects) {
    truth += p.truth.size();
    minilang::Program prog = minilang::parse(p.core_source);
    methods += prog.functions.size();
  }
  Json summary = Json::object();
  summary["cmd"] = "gen-corpus";
  summary["projects"] = corpus.projects.size();
  summary["methods"] = methods;
  summary["ground_truth"] = truth;
  summary["out"] = out_dir;
  summary["config"] = cfg.to_json();
  return summary;
}

Json cmd_run_tests(const std::vector<std::string>& files, const std::vector<std::string>& core,
                   const std::string& tests_glob, uint64_t seed, const std::string& trace_out) {
  minilang::Program prog = load_program(files, core);
  std::regex pattern = glob_regex(tests_glob);
  std::set<std::string> selected;
  for (const std::string& t : prog.tests)
    if (std::regex_match(t, pattern)) selected.insert(t);
  if (selected.empty())
    throw ForgeError("no tests match '" + tests_glob + "'");
  TraceStats st = run_and_trace(prog, selected, trace_out, seed);
  log("ran " + std::to_string(st.tests) + " tests, " + std::to_string(st.records) + " records");

  Json summary = Json::object();
  summary["cmd"] = "run-tests";
  summary["tests"] = st.tests;
  summary["failures"] = st.failures;
  summary["records"] = st.records;
  summary["seed"] = seed;
  summary["trace_out"] = trace_out;
  return summary;
}

Json cmd_compose(const std::string& trace_dir, const std::vector<std::string>& tests,
                 const std::string& out) {
  std::map<std::string, std::vector<trace::TraceRecord>> per_test;
  std::set<std::string> selected;
  if (tests.empty()) {
    per_test = read_trace_dir(trace_dir);
    for (const auto& [name, records] : per_test) selected.insert(name);
  } else {
    for (const std::string& t : tests) {
      per_test[t] = trace::read_records(join_path(trace_dir, t + ".trace"));
      selected.insert(t);
    }
  }
  trace::SplitTraces composed = trace::compose_split(per_test, selected);
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  trace::write_records(out, composed.records);

  Json summary = Json::object();
  summary["cmd"] = "compose";
  summary["tests"] = selected.size();
  summary["records"] = composed.records.size();
  summary["out"] = out;
  return summary;
}

Json cmd_infer(const std::string& traces_file, const std::string& method, const std::string& point,
               int min_support, const std::string& out) {
  trace::SplitTraces split;
  split.records = trace::read_records(traces_file);
  inv::InferenceConfig icfg;
  icfg.min_support = min_support;

  std::vector<trace::Point> points;
  if (point == "entry") {
    points = {trace::Point::Entry};
  } else if (point == "exit") {
    points = {trace::Point::Exit};
  } else if (point == "both") {
    points = {trace::Point::Entry, trace::Point::Exit};
  } else {
    throw ForgeError("unknown point '" + point + "' (expected entry|exit|both)");
  }

  std::vector<Json> rows;
  for (trace::Point p : points) {
    for (const auto& i : inv::infer(split, method, p, icfg)) {
      Json row = Json::object();
      row["render"] = i.render();
      row["inv"] = i.to_json();
      rows.push_back(std::move(row));
    }
  }
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  write_jsonl(out, rows);

  Json summary = Json::object();
  summary["cmd"] = "infer";
  summary["method"] = method;
  summary["point"] = point;
  summary["invariants"] = rows.size();
  summary["out"] = out;
  return summary;
}

Json cmd_label(const std::string& trace_dir, const LabelArgs& args, const std::string& out) {
  auto per_test = read_trace_dir(trace_dir);
  auto [labeled, stats] = label_stage(per_test, args);
  if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
  labeler::write_labeled(out, labeled);

  Json summary = Json::object();
  summary["cmd"] = "label";
  summary["tests"] = per_test.size();
  summary["methods_labeled"] = stats.methods_labeled;
  summary["methods_skipped"] = stats.methods_skipped;
  summary["invariants"] = stats.invariants;
  summary["valid"] = stats.valid;
  Json settings = Json::object();
  settings["splits"] = args.splits;
  settings["fraction"] = args.fraction;
  settings["min_splits"] = args.min_splits;
  settings["min_support"] = args.min_support;
  settings["seed"] = args.seed;
  summary["config"] = settings;
  summary["out"] = out;
  return summary;
}

Json cmd_graph(const std::string& labeled_path, const std::string& programs_dir,
               std::string project, bool invariant_only, const std::string& out_dir) {
  if (project.empty()) project = fs::path(programs_dir).filename().string();
  if (project.empty()) project = "project";

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(programs_dir))
    if (entry.path().extension() == ".mini") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ForgeError("no .mini files under '" + programs_dir + "'");
  minilang::Program prog = load_program(files, {});

  auto labeled = labeler::read_labeled(labeled_path);
  fs::create_directories(out_dir);
  std::string out_file = join_path(out_dir, project + ".jsonl");
  GraphStats st = graph_stage(labeled, prog, project, invariant_only, out_file);

  Json summary = Json::object();
  summary["cmd"] = "graph";
  summary["project"] = project;
  summary["graphs"] = st.graphs;
  summary["skipped"] = st.skipped;
  summary["invariant_only"] = invariant_only;
  summary["out"] = out_file;
  return summary;
}

struct TrainFlags {
  std::string model = "ggnn";
  std::string config_path;
  bool epochs_given = false;
  int epochs = 3;
  bool seed_given = false;
  uint64_t seed = 0;
  bool hidden_given = false;
  int hidden = 0;
  bool steps_given = false;
  int steps = 0;
  bool lr_given = false;
  double lr = 0.0;
  bool budget_given = false;
  int budget = 0;
};

std::pair<model::GgnnConfig, model::RnnConfig> model_configs(const Json& settings,
                                                             const TrainFlags& f,
                                                             const std::string& where) {
  model::GgnnConfig g = settings.is_object() && !settings.empty()
                            ? model::GgnnConfig::from_json(settings, where)
                            : model::GgnnConfig{};
  model::RnnConfig r = settings.is_object() && !settings.empty()
                           ? model::RnnConfig::from_json(settings, where)
                           : model::RnnConfig{};
  bool cfg_has_seed = settings.is_object() && settings.contains("seed");
  uint64_t seed = resolve_seed(f.seed_given, f.seed, cfg_has_seed, g.seed);
  g.seed = seed;
  r.seed = seed;
  if (f.epochs_given) {
    g.epochs = f.epochs;
    r.epochs = f.epochs;
  }
  if (f.hidden_given) {
    g.hidden_dim = f.hidden;
    g.head_hidden = f.hidden;
    r.state_dim = f.hidden;
  }
  if (f.steps_given) g.steps = f.steps;
  if (f.lr_given) {
    g.learning_rate = f.lr;
    r.learning_rate = f.lr;
  }
  if (f.budget_given) {
    g.batch_token_budget = f.budget;
    r.batch_token_budget = f.budget;
  }
  return {g, r};
}

Json cmd_train(const std::string& graphs_dir, const TrainFlags& flags, const std::string& out_dir) {
  model::ModelKind kind = parse_model_kind(flags.model);
  Json settings = flags.config_path.empty() ? Json::object() : read_json_file(flags.config_path);
  auto [gcfg, rcfg] = model_configs(settings, flags, flags.config_path);

  std::vector<graphs::MethodGraph> gs;
  read_graph_rows(graph_files_in(graphs_dir), gs, nullptr);
  TrainOut out = train_stage(kind, gs, gcfg, rcfg, out_dir);

  Json summary = out.summary;
  summary["cmd"] = "train";
  summary["config"] = kind == model::ModelKind::Rnn ? rcfg.to_json() : gcfg.to_json();
  return summary;
}

Json cmd_rank(const std::string& ckpt_path, const std::string& graphs_dir,
              const std::string& out) {
  model::Checkpoint ckpt = model::load_checkpoint(ckpt_path);
  auto rows = rank_stage(ckpt, graph_files_in(graphs_dir), out);

  Json summary = Json::object();
  summary["cmd"] = "rank";
  summary["model"] = model::model_kind_name(ckpt.kind);
  summary["graphs"] = rows.size();
  summary["out"] = out;
  return summary;
}

Json cmd_eval(const std::string& scores_path, const std::string& labels_path,
              const std::string& golden_path, bool per_method,
              const std::vector<double>& partial_fpr, const std::string& roc_out) {
  std::vector<Json> score_rows;
  read_jsonl(scores_path, [&](size_t, const Json& v) { score_rows.push_back(v); });
  LabelIndex labels = load_label_index(labels_path);
  std::optional<LabelIndex> golden;
  if (!golden_path.empty()) golden = load_golden_index(golden_path);

  Json summary = eval_stage(score_rows, labels, golden ? &*golden : nullptr, per_method,
                            partial_fpr, roc_out, scores_path);
  summary["cmd"] = "eval";
  return summary;
}

Json cmd_pipeline(const std::string& config_path, bool seed_given, uint64_t seed,
                  const std::string& model_override, bool epochs_given, int epochs, int jobs) {
  PipelineConfig cfg = PipelineConfig::from_json(read_json_file(config_path), config_path);
  if (!model_override.empty()) cfg.model = model_override;
  cfg.seed = resolve_seed(seed_given, seed, cfg.seed_from_config, cfg.seed);
  cfg.validate();

  if (cfg.generate) {
    Json gen_json = cfg.gen;
    if (seed_given) gen_json["seed"] = seed;
    corpusgen::GenConfig gen_cfg = corpusgen::GenConfig::from_json(gen_json, "config.generate");
    corpusgen::write_corpus(cfg.corpus(), corpusgen::generate(gen_cfg));
    cfg.gen = gen_cfg.to_json();
    log("generated corpus at " + cfg.corpus());
  }

  std::vector<std::string> projects = corpusgen::corpus_projects(cfg.corpus());
  if (projects.size() < 2) throw ForgeError("pipeline needs at least two projects to split");
  std::vector<std::string> test_projects = cfg.test_projects;
  if (test_projects.empty()) {
    size_t k = std::max<size_t>(1, projects.size() / 4);
    test_projects.assign(projects.end() - static_cast<long>(k), projects.end());
  }
  std::set<std::string> test_set(test_projects.begin(), test_projects.end());
  for (const std::string& t : test_projects)
    if (std::find(projects.begin(), projects.end(), t) == projects.end())
      throw ForgeError("test project '" + t + "' is not in the corpus");
  std::vector<std::string> train_projects;
  for (const std::string& p : projects)
    if (!test_set.count(p)) train_projects.push_back(p);
  if (train_projects.empty()) throw ForgeError("no projects left to train on");

  bool invariant_only = parse_model_kind(cfg.model) == model::ModelKind::NoContext;
  LabelArgs largs;
  largs.splits = cfg.splits;
  largs.fraction = cfg.fraction;
  largs.seed = cfg.seed;
  largs.min_splits = cfg.min_splits;
  largs.min_support = cfg.min_support;

  size_t total_tests = 0, total_invariants = 0, total_graphs = 0, total_skipped = 0;
  std::vector<Json> combined_rows;
  fs::create_directories(cfg.labels());
  for (const std::string& p : projects) {
    minilang::Program prog = load_program(project_sources(cfg.corpus(), p), {});
    TraceStats ts = run_and_trace(prog, prog.tests, join_path(cfg.traces(), p), cfg.seed);
    if (ts.failures > 0)
      throw ForgeError("project '" + p + "' has " + std::to_string(ts.failures) +
                       " failing tests");
    total_tests += ts.tests;

    auto per_test = read_trace_dir(join_path(cfg.traces(), p));
    auto [labeled, stats] = label_stage(per_test, largs);
    labeler::write_labeled(join_path(cfg.labels(), p + ".jsonl"), labeled);
    for (const auto& li : labeled) {
      Json row = li.to_json();
      row["project"] = p;
      combined_rows.push_back(std::move(row));
    }
    total_invariants += labeled.size();

    GraphStats gs = graph_stage(labeled, prog, p, invariant_only,
                                join_path(cfg.graphs(), p + ".jsonl"));
    total_graphs += gs.graphs;
    total_skipped += gs.skipped;
    log("project " + p + ": " + std::to_string(ts.tests) + " tests, " +
        std::to_string(labeled.size()) + " labeled invariants");
  }
  std::string labeled_path = join_path(cfg.labels(), "labeled.jsonl");
  write_jsonl(labeled_path, combined_rows);

  auto [gcfg, rcfg] = model_configs(cfg.model_settings, TrainFlags{}, config_path);
  gcfg.seed = cfg.model_settings.contains("seed") ? gcfg.seed : cfg.seed;
  rcfg.seed = gcfg.seed;
  if (epochs_given) {
    gcfg.epochs = epochs;
    rcfg.epochs = epochs;
  }
  std::vector<graphs::MethodGraph> train_graphs;
  std::vector<std::string> train_files;
  for (const std::string& p : train_projects)
    train_files.push_back(join_path(cfg.graphs(), p + ".jsonl"));
  read_graph_rows(train_files, train_graphs, nullptr);
  TrainOut trained = train_stage(parse_model_kind(cfg.model), train_graphs, gcfg, rcfg,
                                 cfg.checkpoints());
  log("trained " + cfg.model + " on " + std::to_string(train_graphs.size()) + " graphs");

  std::vector<std::string> test_files;
  for (const std::string& p : test_projects)
    test_files.push_back(join_path(cfg.graphs(), p + ".jsonl"));
  std::string scores_path = join_path(cfg.eval(), "scores.jsonl");
  auto score_rows = rank_stage(trained.checkpoint, test_files, scores_path);

  std::vector<Json> golden_rows;
  for (const std::string& p : test_projects) {
    std::string gt_path = join_path(join_path(cfg.corpus(), p), "ground_truth.jsonl");
    if (!fs::exists(gt_path)) continue;
    for (const auto& e : corpusgen::read_ground_truth(gt_path)) {
      Json row = Json::object();
      row["project"] = e.project;
      row["inv"] = e.invariant.to_json();
      row["label"] = e.valid ? "valid" : "invalid";
      row["provenance"] = e.provenance;
      golden_rows.push_back(std::move(row));
    }
  }
  std::string golden_path;
  if (!golden_rows.empty()) {
    golden_path = join_path(cfg.eval(), "golden.jsonl");
    write_jsonl(golden_path, golden_rows);
  }

  LabelIndex label_index = load_label_index(labeled_path);
  std::optional<LabelIndex> golden_index;
  if (!golden_path.empty()) golden_index = load_golden_index(golden_path);
  std::string roc_path = join_path(cfg.eval(), "roc.csv");
  Json eval_summary = eval_stage(score_rows, label_index, golden_index ? &*golden_index : nullptr,
                                 cfg.per_method, cfg.partial_fpr, roc_path, scores_path);

  Json summary = Json::object();
  summary["cmd"] = "pipeline";
  summary["projects"] = projects.size();
  summary["train_projects"] = train_projects;
  summary["test_projects"] = test_projects;
  summary["tests"] = total_tests;
  summary["invariants"] = total_invariants;
  summary["graphs"] = total_graphs;
  summary["skipped_graphs"] = total_skipped;
  summary["train"] = trained.summary;
  summary["eval"] = eval_summary;
  summary["labeled"] = labeled_path;
  summary["scores"] = scores_path;
  summary["roc"] = roc_path;
  summary["jobs"] = jobs;
  Json effective = cfg.to_json();
  if (epochs_given) effective["model"]["epochs"] = epochs;
  summary["config"] = effective;
  return summary;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::string* summary_out) {
  CLI::App app{"invariant mining and validation workbench"};
  app.require_subcommand(1);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic benchmark corpus");
  std::string gen_config, gen_out = "corpus";
  uint64_t gen_seed = 0;
  gen->add_option("--config", gen_config, "generator config file (json)");
  gen->add_option("--out", gen_out, "output corpus directory");
  gen->add_option("--seed", gen_seed, "generator seed");

  // run-tests
  auto* run = app.add_subcommand("run-tests", "execute tests under tracing");
  std::vector<std::string> run_files, run_core;
  std::string run_glob = "*", run_out = "traces";
  uint64_t run_seed = 0;
  run->add_option("files", run_files, "source files (.mini)")->required()->expected(-1);
  run->add_option("--core", run_core, "core function names to instrument")->delimiter(',');
  run->add_option("--tests", run_glob, "glob over test names");
  run->add_option("--seed", run_seed, "interpreter seed");
  run->add_option("--trace-out", run_out, "trace output directory");

  // compose
  auto* comp = app.add_subcommand("compose", "concatenate per-test traces into a split");
  std::string comp_dir, comp_out = "composed.trace";
  std::vector<std::string> comp_tests;
  comp->add_option("--trace-dir", comp_dir, "directory of .trace files")->required();
  comp->add_option("--tests", comp_tests, "test names (default: all)")->delimiter(',');
  comp->add_option("--out", comp_out, "output trace file");

  // infer
  auto* inf = app.add_subcommand("infer", "infer invariants from a composed trace");
  std::string inf_traces, inf_method, inf_point = "both", inf_out = "inferred.jsonl";
  int inf_support = 5;
  inf->add_option("--traces", inf_traces, "composed trace file")->required();
  inf->add_option("--method", inf_method, "method to infer for")->required();
  inf->add_option("--point", inf_point, "entry|exit|both");
  inf->add_option("--min-support", inf_support, "minimum records to infer from");
  inf->add_option("--out", inf_out, "output jsonl file");

  // label
  auto* lab = app.add_subcommand("label", "cross-validate invariants into noisy labels");
  std::string lab_dir, lab_out = "labeled.jsonl";
  LabelArgs lab_args;
  bool lab_seed_given = false;
  lab->add_option("--trace-dir", lab_dir, "directory of .trace files")->required();
  lab->add_option("--splits", lab_args.splits, "number of cross-validation splits");
  lab->add_option("--fraction", lab_args.fraction, "fraction of tests per split");
  lab->add_option("--seed", lab_args.seed, "split sampling seed")
      ->each([&](const std::string&) { lab_seed_given = true; });
  lab->add_option("--min-splits", lab_args.min_splits, "minimum covering splits per method");
  lab->add_option("--min-support", lab_args.min_support, "minimum records per covering split");
  lab->add_option("--out", lab_out, "output jsonl file");

  // graph
  auto* gra = app.add_subcommand("graph", "build labeled program graphs");
  std::string gra_labeled, gra_programs, gra_project, gra_out = "graphs";
  bool gra_inv_only = false;
  gra->add_option("--labeled", gra_labeled, "labeled invariants jsonl")->required();
  gra->add_option("--programs", gra_programs, "directory of .mini sources")->required();
  gra->add_option("--project", gra_project, "project name (default: directory name)");
  gra->add_flag("--invariant-only", gra_inv_only, "emit bare invariant graphs (no method context)");
  gra->add_option("--out", gra_out, "output graph directory");

  // train
  auto* tra = app.add_subcommand("train", "train a validity model on labeled graphs");
  std::string tra_graphs, tra_out = "ckpt";
  TrainFlags tf;
  tra->add_option("--model", tf.model, "ggnn|rnn|nocontext");
  tra->add_option("--graphs", tra_graphs, "graph directory")->required();
  tra->add_option("--config", tf.config_path, "model settings file (json)");
  tra->add_option("--epochs", tf.epochs, "training epochs")
      ->each([&](const std::string&) { tf.epochs_given = true; });
  tra->add_option("--seed", tf.seed, "initialization seed")
      ->each([&](const std::string&) { tf.seed_given = true; });
  tra->add_option("--hidden", tf.hidden, "hidden dimension")
      ->each([&](const std::string&) { tf.hidden_given = true; });
  tra->add_option("--steps", tf.steps, "propagation steps (ggnn)")
      ->each([&](const std::string&) { tf.steps_given = true; });
  tra->add_option("--lr", tf.lr, "learning rate")
      ->each([&](const std::string&) { tf.lr_given = true; });
  tra->add_option("--budget", tf.budget, "batch node/token budget")
      ->each([&](const std::string&) { tf.budget_given = true; });
  tra->add_option("--out", tra_out, "checkpoint output directory");

  // rank
  auto* rnk = app.add_subcommand("rank", "score graphs with a trained checkpoint");
  std::string rnk_ckpt, rnk_graphs, rnk_out = "scores.jsonl";
  rnk->add_option("--ckpt", rnk_ckpt, "checkpoint file")->required();
  rnk->add_option("--graphs", rnk_graphs, "graph directory")->required();
  rnk->add_option("--out", rnk_out, "output scores jsonl");

  // eval
  auto* evl = app.add_subcommand("eval", "evaluate model scores against labels");
  std::string evl_scores, evl_labels, evl_golden, evl_roc = "roc.csv";
  bool evl_per_method = false;
  std::vector<double> evl_partial = {0.05, 0.25};
  evl->add_option("--scores", evl_scores, "scores jsonl")->required();
  evl->add_option("--labels", evl_labels, "labeled invariants jsonl")->required();
  evl->add_option("--golden", evl_golden, "golden annotations jsonl");
  evl->add_flag("--per-method", evl_per_method, "also report per-method mean AUC");
  evl->add_option("--partial-fpr", evl_partial, "partial AUC cutoffs")->delimiter(',');
  evl->add_option("--roc-out", evl_roc, "ROC curve csv path");

  // pipeline
  auto* pip = app.add_subcommand("pipeline", "run the full chain from one config");
  std::string pip_config, pip_model;
  uint64_t pip_seed = 0;
  int pip_epochs = 0, pip_jobs = 1;
  bool pip_seed_given = false, pip_epochs_given = false;
  pip->add_option("--config", pip_config, "pipeline config file (json)")->required();
  pip->add_option("--seed", pip_seed, "override every stage seed")
      ->each([&](const std::string&) { pip_seed_given = true; });
  pip->add_option("--model", pip_model, "override model kind");
  pip->add_option("--epochs", pip_epochs, "override training epochs")
      ->each([&](const std::string&) { pip_epochs_given = true; });
  pip->add_option("--jobs", pip_jobs, "worker cap (stages are sequential)");

  std::vector<std::string> argv = args;
  std::vector<const char*> cargv;
  cargv.push_back("forge");
  for (const std::string& a : argv) cargv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    Json summary;
    if (gen->parsed()) {
      summary = cmd_gen_corpus(gen_config, gen_out, gen->count("--seed") > 0, gen_seed);
    } else if (run->parsed()) {
      uint64_t seed = resolve_seed(run->count("--seed") > 0, run_seed, false, 0);
      summary = cmd_run_tests(run_files, run_core, run_glob, seed, run_out);
    } else if (comp->parsed()) {
      summary = cmd_compose(comp_dir, comp_tests, comp_out);
    } else if (inf->parsed()) {
      summary = cmd_infer(inf_traces, inf_method, inf_point, inf_support, inf_out);
    } else if (lab->parsed()) {
      lab_args.seed = resolve_seed(lab_seed_given, lab_args.seed, false, 0);
      summary = cmd_label(lab_dir, lab_args, lab_out);
    } else if (gra->parsed()) {
      summary = cmd_graph(gra_labeled, gra_programs, gra_project, gra_inv_only, gra_out);
    } else if (tra->parsed()) {
      summary = cmd_train(tra_graphs, tf, tra_out);
    } else if (rnk->parsed()) {
      summary = cmd_rank(rnk_ckpt, rnk_graphs, rnk_out);
    } else if (evl->parsed()) {
      summary = cmd_eval(evl_scores, evl_labels, evl_golden, evl_per_method, evl_partial, evl_roc);
    } else if (pip->parsed()) {
      summary = cmd_pipeline(pip_config, pip_seed_given, pip_seed, pip_model, pip_epochs_given,
                             pip_epochs, pip_jobs);
    } else {
      std::cerr << "usage error: no subcommand\n";
      return 2;
    }
    std::string line = summary.dump();
    std::cout << line << "\n";
    if (summary_out) *summary_out = line;
    return 0;
  } catch (const ForgeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace forge::cli
