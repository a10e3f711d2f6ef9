#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "forge/corpusgen/corpusgen.hpp"
#include "forge/graphs/graph.hpp"
#include "forge/invariants/infer.hpp"
#include "forge/labeler/label.hpp"
#include "forge/minilang/interp.hpp"
#include "forge/minilang/parser.hpp"
#include "forge/trace/record.hpp"

using namespace forge;

namespace {

minilang::Program load(const corpusgen::GeneratedProject& p) {
  minilang::Program prog = minilang::parse(p.core_source + "\n" + p.tests_source);
  for (const auto& f : prog.functions)
    if (prog.tests.find(f.name) == prog.tests.end()) prog.core.insert(f.name);
  return prog;
}

std::map<std::string, std::vector<trace::TraceRecord>> trace_per_test(
    const minilang::Program& prog, uint64_t seed) {
  std::map<std::string, std::vector<trace::TraceRecord>> per_test;
  for (const std::string& t : prog.tests) {
    minilang::CollectingSink sink;
    auto report = minilang::run_tests(prog, {t}, sink, seed);
    REQUIRE(report.failures() == 0);
    per_test[t] = std::move(sink.records);
  }
  return per_test;
}

corpusgen::GenConfig mixed_config() {
  corpusgen::GenConfig cfg;
  cfg.n_projects = 2;
  cfg.methods_per_project = 6;
  cfg.weights = {{"guard", 1.0}, {"abs", 1.0}, {"clamp", 1.0}, {"counter", 1.0}};
  cfg.tests_per_method = 4;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("corpus generation is deterministic and seed sensitive") {
  corpusgen::GenConfig cfg = mixed_config();
  corpusgen::Corpus a = corpusgen::generate(cfg);
  corpusgen::Corpus b = corpusgen::generate(cfg);
  CHECK(a == b);

  cfg.seed = 12;
  corpusgen::Corpus c = corpusgen::generate(cfg);
  bool differs = false;
  for (size_t i = 0; i < a.projects.size(); ++i)
    if (a.projects[i].tests_source != c.projects[i].tests_source) differs = true;
  CHECK(differs);
}

TEST_CASE("projects use disjoint identifier vocabularies and per-project naming styles") {
  corpusgen::GenConfig cfg = mixed_config();
  cfg.n_projects = 4;
  corpusgen::Corpus corpus = corpusgen::generate(cfg);

  std::vector<std::set<std::string>> vocab(corpus.projects.size());
  for (size_t i = 0; i < corpus.projects.size(); ++i) {
    minilang::Program prog = load(corpus.projects[i]);
    bool want_snake = i % 2 == 0;
    for (const auto& fn : prog.functions) {
      if (prog.tests.count(fn.name)) continue;
      bool has_underscore = fn.name.find('_') != std::string::npos;
      bool has_upper = std::any_of(fn.name.begin(), fn.name.end(),
                                   [](unsigned char c) { return std::isupper(c); });
      if (want_snake) {
        CHECK(has_underscore);
        CHECK(!has_upper);
      } else {
        CHECK(has_upper);
        CHECK(!has_underscore);
      }
      for (const std::string& tok : graphs::subtokenize(fn.name)) vocab[i].insert(tok);
      for (const std::string& p : fn.params)
        for (const std::string& tok : graphs::subtokenize(p)) vocab[i].insert(tok);
    }
    CHECK(!vocab[i].empty());
  }
  for (size_t i = 0; i < vocab.size(); ++i)
    for (size_t j = i + 1; j < vocab.size(); ++j) {
      std::vector<std::string> common;
      std::set_intersection(vocab[i].begin(), vocab[i].end(), vocab[j].begin(), vocab[j].end(),
                            std::back_inserter(common));
      CHECK(common.empty());
    }
}

TEST_CASE("generated programs parse and their tests pass") {
  corpusgen::Corpus corpus = corpusgen::generate(mixed_config());
  for (const auto& project : corpus.projects) {
    minilang::Program prog = load(project);
    CHECK(prog.tests.size() == prog.functions.size() - prog.core.size());
    minilang::CollectingSink sink;
    auto report = minilang::run_tests(prog, prog.tests, sink, 1);
    CHECK(report.failures() == 0);
    CHECK(!sink.records.empty());
  }
}

TEST_CASE("method and test counts follow the config") {
  corpusgen::GenConfig cfg = mixed_config();
  cfg.n_projects = 1;
  cfg.methods_per_project = 5;
  cfg.weights = {{"guard", 1.0}};
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  minilang::Program prog = load(corpus.projects[0]);
  // A guard pair takes two slots, so an odd budget leaves one unfilled.
  CHECK(prog.core.size() == 4);
  CHECK(prog.tests.size() == 4 * static_cast<size_t>(cfg.tests_per_method));

  cfg.weights = {{"guard", 1.0}, {"abs", 1.0}};
  corpus = corpusgen::generate(cfg);
  prog = load(corpus.projects[0]);
  CHECK(prog.core.size() == 5);
  CHECK(prog.tests.size() == 5 * static_cast<size_t>(cfg.tests_per_method));
}

TEST_CASE("guard pairs mirror ground truth expressions across labels") {
  corpusgen::GenConfig cfg;
  cfg.n_projects = 1;
  cfg.methods_per_project = 8;
  cfg.weights = {{"guard", 1.0}};
  cfg.tests_per_method = 12;
  cfg.seed = 3;
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  const auto& truth = corpus.projects[0].truth;
  REQUIRE(truth.size() == 8);

  std::vector<std::string> valid_exprs, invalid_exprs;
  for (const auto& e : truth) {
    CHECK(e.invariant.point == trace::Point::Entry);
    (e.valid ? valid_exprs : invalid_exprs).push_back(e.invariant.render_expr());
  }
  std::sort(valid_exprs.begin(), valid_exprs.end());
  std::sort(invalid_exprs.begin(), invalid_exprs.end());
  CHECK(valid_exprs.size() == 4);
  CHECK(valid_exprs == invalid_exprs);
}

TEST_CASE("full coverage guard pair yields mirrored mined labels") {
  corpusgen::GenConfig cfg;
  cfg.n_projects = 1;
  cfg.methods_per_project = 2;
  cfg.weights = {{"guard", 1.0}};
  cfg.tests_per_method = 12;
  cfg.seed = 7;
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  const auto& project = corpus.projects[0];
  REQUIRE(project.truth.size() == 2);
  std::string guarded, plain;
  for (const auto& e : project.truth) (e.valid ? plain : guarded) = e.invariant.method;
  REQUIRE(!guarded.empty());
  REQUIRE(!plain.empty());

  minilang::Program prog = load(project);
  auto per_test = trace_per_test(prog, 5);
  auto plan = labeler::make_splits(prog.tests, 40, 0.25, 3);
  inv::InferenceConfig icfg;
  auto labeled = labeler::label_corpus(per_test, plan, icfg);

  std::vector<std::string> guarded_exprs, plain_exprs;
  for (const auto& li : labeled) {
    std::string key = (li.invariant.point == trace::Point::Entry ? "pre " : "post ") +
                      li.invariant.render_expr();
    if (li.invariant.method == guarded) {
      CHECK(!li.valid);
      CHECK(li.score < 1.0);
      guarded_exprs.push_back(key);
    } else {
      REQUIRE(li.invariant.method == plain);
      CHECK(li.valid);
      CHECK(li.score == 1.0);
      plain_exprs.push_back(key);
    }
  }
  std::sort(guarded_exprs.begin(), guarded_exprs.end());
  std::sort(plain_exprs.begin(), plain_exprs.end());
  CHECK(guarded_exprs == plain_exprs);
  CHECK(guarded_exprs.size() == 8);
}

TEST_CASE("sparse counter trap mines as valid while ground truth rejects it") {
  corpusgen::GenConfig cfg;
  cfg.n_projects = 1;
  cfg.methods_per_project = 2;
  cfg.weights = {{"counter", 1.0}};
  cfg.coverage.profile = "sparse";
  cfg.coverage.p = 1.0;
  cfg.tests_per_method = 6;
  cfg.seed = 9;
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  const auto& project = corpus.projects[0];

  std::vector<corpusgen::GroundTruthEntry> traps;
  for (const auto& e : project.truth)
    if (e.provenance == "counter:sparsity_equality") traps.push_back(e);
  REQUIRE(traps.size() == 2);
  for (const auto& t : traps) CHECK(!t.valid);

  minilang::Program prog = load(project);
  auto per_test = trace_per_test(prog, 2);

  auto whole = trace::compose_split(per_test, prog.tests);
  inv::InferenceConfig icfg;
  for (const auto& t : traps) {
    auto inferred = inv::infer(whole, t.invariant.method, trace::Point::Entry, icfg);
    CHECK(std::find(inferred.begin(), inferred.end(), t.invariant) != inferred.end());
  }

  auto plan = labeler::make_splits(prog.tests, 20, 0.34, 1);
  auto labeled = labeler::label_corpus(per_test, plan, icfg);
  for (const auto& t : traps) {
    bool found = false;
    for (const auto& li : labeled)
      if (li.invariant == t.invariant) {
        found = true;
        CHECK(li.valid);
        CHECK(li.score == 1.0);
      }
    CHECK(found);
  }
}

TEST_CASE("ground truth marked valid holds on every full suite record") {
  corpusgen::GenConfig cfg = mixed_config();
  cfg.n_projects = 1;
  cfg.methods_per_project = 8;
  cfg.seed = 21;
  corpusgen::Corpus corpus = corpusgen::generate(cfg);
  const auto& project = corpus.projects[0];

  minilang::Program prog = load(project);
  auto per_test = trace_per_test(prog, 4);
  std::vector<trace::TraceRecord> records;
  for (auto& [test, recs] : per_test)
    records.insert(records.end(), recs.begin(), recs.end());
  REQUIRE(!records.empty());

  int checked = 0;
  for (const auto& e : project.truth) {
    if (!e.valid) continue;
    for (const auto& r : records) {
      if (r.method != e.invariant.method || r.point != e.invariant.point) continue;
      CHECK(inv::evaluate(e.invariant, r));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("twin copies append renamed duplicates") {
  corpusgen::GenConfig cfg = mixed_config();
  cfg.n_projects = 1;
  corpusgen::GenConfig twin = cfg;
  twin.twin_copies = true;

  corpusgen::Corpus base = corpusgen::generate(cfg);
  corpusgen::Corpus doubled = corpusgen::generate(twin);
  const auto& bp = base.projects[0];
  const auto& dp = doubled.projects[0];

  CHECK(dp.core_source.substr(0, bp.core_source.size()) == bp.core_source);
  CHECK(dp.truth.size() == 2 * bp.truth.size());

  minilang::Program base_prog = load(bp);
  minilang::Program twin_prog = load(dp);
  CHECK(twin_prog.core.size() == 2 * base_prog.core.size());
  CHECK(twin_prog.tests.size() == 2 * base_prog.tests.size());

  size_t n = bp.truth.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& orig = dp.truth[i];
    const auto& copy = dp.truth[i + n];
    CHECK(orig.invariant.method != copy.invariant.method);
    CHECK(orig.invariant.render_expr() == copy.invariant.render_expr());
    CHECK(orig.invariant.point == copy.invariant.point);
    CHECK(orig.valid == copy.valid);
    CHECK(orig.provenance == copy.provenance);
  }

  minilang::CollectingSink sink;
  auto report = minilang::run_tests(twin_prog, twin_prog.tests, sink, 1);
  CHECK(report.failures() == 0);
}

TEST_CASE("generator config validates and round trips through json") {
  corpusgen::GenConfig cfg = mixed_config();
  cfg.coverage.profile = "sparse";
  cfg.coverage.p = 0.4;
  cfg.twin_copies = true;
  cfg.seed = 99;
  corpusgen::GenConfig back = corpusgen::GenConfig::from_json(cfg.to_json(), "cfg");
  CHECK(back == cfg);

  auto reject = [](void (*tweak)(corpusgen::GenConfig&)) {
    corpusgen::GenConfig bad;
    tweak(bad);
    CHECK_THROWS_AS(bad.validate(), ForgeError);
  };
  reject([](corpusgen::GenConfig& c) { c.n_projects = 0; });
  reject([](corpusgen::GenConfig& c) { c.methods_per_project = 0; });
  reject([](corpusgen::GenConfig& c) { c.tests_per_method = 1; });
  reject([](corpusgen::GenConfig& c) { c.weights = {}; });
  reject([](corpusgen::GenConfig& c) { c.weights = {{"guard", 0.0}}; });
  reject([](corpusgen::GenConfig& c) { c.weights = {{"maze", 1.0}}; });
  reject([](corpusgen::GenConfig& c) { c.weights = {{"abs", -1.0}}; });
  reject([](corpusgen::GenConfig& c) { c.coverage.profile = "dense"; });
  reject([](corpusgen::GenConfig& c) {
    c.coverage.profile = "sparse";
    c.coverage.p = 1.5;
  });

  CHECK_THROWS_AS(corpusgen::GenConfig::from_json(Json::array(), "cfg"), FormatError);
  Json bad_weights = corpusgen::GenConfig().to_json();
  bad_weights["weights"] = Json::array();
  CHECK_THROWS_AS(corpusgen::GenConfig::from_json(bad_weights, "cfg"), FormatError);
}

TEST_CASE("corpus files round trip through the on disk layout") {
  corpusgen::GenConfig cfg = mixed_config();
  corpusgen::Corpus corpus = corpusgen::generate(cfg);

  namespace fs = std::filesystem;
  fs::path dir = fs::path("corpusgen_io_tmp");
  fs::remove_all(dir);
  corpusgen::write_corpus(dir.string(), corpus);

  auto names = corpusgen::corpus_projects(dir.string());
  REQUIRE(names.size() == corpus.projects.size());
  for (size_t i = 0; i < names.size(); ++i) {
    CHECK(names[i] == corpus.projects[i].name);
    fs::path base = dir / names[i];
    std::ifstream core(base / "src" / "core.mini");
    std::string text((std::istreambuf_iterator<char>(core)), std::istreambuf_iterator<char>());
    CHECK(text == corpus.projects[i].core_source);
    auto truth = corpusgen::read_ground_truth((base / "ground_truth.jsonl").string());
    CHECK(truth == corpus.projects[i].truth);
  }
  fs::remove_all(dir);
}
