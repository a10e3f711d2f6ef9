#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/invariants/invariant.hpp"
#include "forge/jsonl.hpp"

namespace forge::corpusgen {

// Test-coverage profile: "full" suites exercise boundaries; "sparse" ones
// skip them with probability p per numeric method, planting bounds the
// labeler will wrongly validate.
struct Coverage {
  std::string profile = "full";
  double p = 0.3;

  bool operator==(const Coverage&) const = default;
};

struct GenConfig {
  int n_projects = 8;
  int methods_per_project = 32;
  // Template mix: guard (a null-checking/unchecked method pair, two slots)
  // plus single-method numeric templates abs, clamp, counter.
  std::map<std::string, double> weights = {{"guard", 1.0}};
  Coverage coverage;
  int tests_per_method = 12;
  // Emit a renamed copy of every method and its tests, modeling the
  // near-duplication real projects accumulate; cross-project evaluation
  // never sees a twin of a training method, intra-project evaluation does.
  bool twin_copies = false;
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const GenConfig&) const = default;

  Json to_json() const;
  static GenConfig from_json(const Json& v, const std::string& where);
};

// One semantic fact about a generated method: what a sound oracle would say
// about the invariant, independent of what any test suite shows.
struct GroundTruthEntry {
  std::string project;
  inv::Invariant invariant;
  bool valid = false;
  std::string provenance;  // template rule that produced the entry

  bool operator==(const GroundTruthEntry&) const = default;

  Json to_json() const;
  static GroundTruthEntry from_json(const Json& v, const std::string& where);
};

struct GeneratedProject {
  std::string name;
  std::string core_source;   // src/core.mini
  std::string tests_source;  // tests/tests.mini
  std::vector<GroundTruthEntry> truth;

  bool operator==(const GeneratedProject&) const = default;
};

struct Corpus {
  std::vector<GeneratedProject> projects;

  bool operator==(const Corpus&) const = default;
};

// Deterministic in cfg.seed, byte for byte. Identifier vernacular pools are
// disjoint across projects, so a model trained on some projects meets only
// unknown identifiers on the others.
Corpus generate(const GenConfig& cfg);

// Layout: <dir>/manifest.jsonl plus, per project, <name>/src/core.mini,
// <name>/tests/tests.mini, <name>/ground_truth.jsonl.
void write_corpus(const std::string& dir, const Corpus& corpus);

// Project names listed in manifest order.
std::vector<std::string> corpus_projects(const std::string& dir);

void write_ground_truth(const std::string& path, const std::vector<GroundTruthEntry>& truth);
std::vector<GroundTruthEntry> read_ground_truth(const std::string& path);

}  // namespace forge::corpusgen
