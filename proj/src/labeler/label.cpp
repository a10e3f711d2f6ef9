#include "forge/labeler/label.hpp"

#include <algorithm>
#include <cmath>

#include "forge/rng.hpp"

namespace forge::labeler {

SplitPlan make_splits(const std::set<std::string>& tests, int n, double fraction,
                      uint64_t seed) {
  if (tests.empty()) throw ForgeError("cannot split an empty test set");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidFraction(fraction);
  if (n < 1) throw ForgeError("need at least one split");

  std::vector<std::string> names(tests.begin(), tests.end());
  uint32_t k = static_cast<uint32_t>(
      std::ceil(fraction * static_cast<double>(names.size())));

  SplitPlan plan;
  plan.n_splits = n;
  plan.fraction = fraction;
  plan.seed = seed;
  Lcg64 root(seed);
  for (int s = 0; s < n; ++s) {
    Lcg64 rng(root.fork(static_cast<uint64_t>(s)));
    std::set<std::string> split;
    for (uint32_t idx : rng.sample_without_replacement(
             static_cast<uint32_t>(names.size()), k))
      split.insert(names[idx]);
    plan.splits.push_back(std::move(split));
  }
  return plan;
}

Json LabeledInvariant::to_json() const {
  Json j = Json::object();
  j["method"] = invariant.method;
  j["point"] = invariant.point == trace::Point::Entry ? "pre" : "post";
  j["render"] = invariant.render_expr();
  j["inv"] = invariant.to_json();
  j["supporting"] = supporting_splits;
  j["covering"] = covering_splits;
  j["score"] = score;
  j["label"] = valid ? "valid" : "invalid";
  return j;
}

LabeledInvariant LabeledInvariant::from_json(const Json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("inv"))
    throw FormatError(where, "labeled invariant missing 'inv'");
  LabeledInvariant li;
  li.invariant = inv::Invariant::from_json(v["inv"], where);
  for (const char* f : {"supporting", "covering", "score", "label"})
    if (!v.contains(f)) throw FormatError(where, std::string("missing '") + f + "'");
  if (!v["supporting"].is_number_integer() || !v["covering"].is_number_integer())
    throw FormatError(where, "supporting/covering must be integers");
  li.supporting_splits = v["supporting"].get<int>();
  li.covering_splits = v["covering"].get<int>();
  if (!v["score"].is_number()) throw FormatError(where, "score must be a number");
  li.score = v["score"].get<double>();
  std::string label = v["label"].is_string() ? v["label"].get<std::string>() : "";
  if (label != "valid" && label != "invalid")
    throw FormatError(where, "label must be valid|invalid");
  li.valid = label == "valid";
  if (li.supporting_splits < 1 || li.supporting_splits > li.covering_splits)
    throw FormatError(where, "supporting out of range");
  if (li.valid != (li.score == 1.0)) throw FormatError(where, "label inconsistent with score");
  return li;
}

std::vector<LabeledInvariant> label_corpus(
    const std::map<std::string, std::vector<trace::TraceRecord>>& per_test,
    const SplitPlan& plan, const inv::InferenceConfig& cfg, int min_splits,
    LabelSummary* summary) {
  for (const auto& split : plan.splits)
    for (const std::string& t : split)
      if (!per_test.count(t)) throw trace::MissingTrace(t);

  using MethodPoint = std::pair<std::string, trace::Point>;

  // Per-split record counts and inferences, keyed by (method, point).
  std::map<MethodPoint, std::vector<int>> covering;           // split ids
  std::map<MethodPoint, std::map<int, std::vector<inv::Invariant>>> inferred;

  for (size_t s = 0; s < plan.splits.size(); ++s) {
    trace::SplitTraces split =
        trace::compose_split(per_test, plan.splits[s], static_cast<int>(s));
    std::map<MethodPoint, int> counts;
    for (const trace::TraceRecord& r : split.records) ++counts[{r.method, r.point}];
    for (const auto& [mp, count] : counts) {
      // A split too sparse to infer from does not get a vote: otherwise a
      // covering split with fewer records than min_support would refute
      // every invariant, including ones inference itself produces on the
      // full suite.
      if (count < cfg.min_support) continue;
      covering[mp].push_back(static_cast<int>(s));
      inferred[mp][static_cast<int>(s)] = inv::infer(split, mp.first, mp.second, cfg);
    }
  }

  std::vector<LabeledInvariant> out;
  LabelSummary sum;
  std::set<std::string> labeled_methods, skipped_methods;

  for (const auto& [mp, splits] : covering) {
    if (static_cast<int>(splits.size()) < min_splits) {
      skipped_methods.insert(mp.first);
      continue;
    }
    labeled_methods.insert(mp.first);

    std::set<inv::Invariant> universe;
    for (int s : splits) {
      const auto& set = inferred[mp][s];
      universe.insert(set.begin(), set.end());
    }

    for (const inv::Invariant& cand : universe) {
      int supporting = 0;
      for (int s : splits) {
        const auto& set = inferred[mp][s];
        bool supported = false;
        for (const inv::Invariant& j : set) {
          if (inv::implies(j, cand)) {
            supported = true;
            break;
          }
        }
        if (supported) ++supporting;
      }
      LabeledInvariant li;
      li.invariant = cand;
      li.supporting_splits = supporting;
      li.covering_splits = static_cast<int>(splits.size());
      li.score = static_cast<double>(supporting) / static_cast<double>(splits.size());
      li.valid = supporting == static_cast<int>(splits.size());
      out.push_back(std::move(li));
    }
  }

  std::sort(out.begin(), out.end(), [](const LabeledInvariant& a, const LabeledInvariant& b) {
    return a.invariant < b.invariant;
  });

  sum.methods_labeled = static_cast<int>(labeled_methods.size());
  for (const std::string& m : skipped_methods)
    if (!labeled_methods.count(m)) ++sum.methods_skipped;
  sum.invariants = static_cast<int>(out.size());
  for (const auto& li : out)
    if (li.valid) ++sum.valid;
  if (summary) *summary = sum;
  return out;
}

void write_labeled(const std::string& path, const std::vector<LabeledInvariant>& items) {
  std::vector<Json> lines;
  lines.reserve(items.size());
  for (const auto& li : items) lines.push_back(li.to_json());
  write_jsonl(path, lines);
}

std::vector<LabeledInvariant> read_labeled(const std::string& path) {
  std::vector<LabeledInvariant> out;
  read_jsonl(path, [&](size_t lineno, const Json& v) {
    out.push_back(LabeledInvariant::from_json(v, path + ":" + std::to_string(lineno)));
  });
  return out;
}

}  // namespace forge::labeler
