#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/invariants/infer.hpp"
#include "forge/jsonl.hpp"
#include "forge/trace/record.hpp"

namespace forge::labeler {

struct SplitPlan {
  int n_splits = 100;
  double fraction = 0.10;
  uint64_t seed = 0;
  std::vector<std::set<std::string>> splits;
};

class InvalidFraction : public ForgeError {
 public:
  explicit InvalidFraction(double f)
      : ForgeError("fraction must lie in (0, 1], got " + std::to_string(f)) {}
};

// n independent uniform samples of ceil(fraction * |tests|) distinct tests.
// Reproducible from the seed alone; each split draws from its own forked
// stream so plans are stable under changes to n.
SplitPlan make_splits(const std::set<std::string>& tests, int n, double fraction,
                      uint64_t seed);

struct LabeledInvariant {
  inv::Invariant invariant;
  int supporting_splits = 0;
  int covering_splits = 0;
  double score = 0.0;  // supporting / covering
  bool valid = false;  // score == 1.0

  Json to_json() const;
  static LabeledInvariant from_json(const Json& v, const std::string& where);
};

struct LabelSummary {
  int methods_labeled = 0;
  int methods_skipped = 0;  // covering below min_splits
  int invariants = 0;
  int valid = 0;
};

// Cross-validates invariants over the plan's splits. For each (method,
// point): a split covers it when its composed traces hold enough records to
// infer from (>= cfg.min_support); the candidate universe is the union of
// per-split inferences; a split supports candidate i when it inferred some j
// with implies(j, i). Methods covered by fewer than min_splits splits are
// skipped and counted in the summary. Output is sorted, so identical inputs
// produce identical bytes.
std::vector<LabeledInvariant> label_corpus(
    const std::map<std::string, std::vector<trace::TraceRecord>>& per_test,
    const SplitPlan& plan, const inv::InferenceConfig& cfg, int min_splits = 10,
    LabelSummary* summary = nullptr);

void write_labeled(const std::string& path, const std::vector<LabeledInvariant>& items);
std::vector<LabeledInvariant> read_labeled(const std::string& path);

}  // namespace forge::labeler
