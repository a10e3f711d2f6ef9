#pragma once

#include <map>
#include <string>
#include <vector>

#include "forge/error.hpp"

namespace forge::metrics {

class SingleClass : public ForgeError {
 public:
  explicit SingleClass(const std::string& where)
      : ForgeError(where + ": needs at least one positive and one negative label") {}
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

// Threshold-sweep curve from (0,0) to (1,1), nondecreasing in both
// coordinates, with the trapezoidal area attached.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps thresholds over distinct scores descending. A tie group advances
// TPR and FPR jointly, producing one diagonal segment, which makes the
// trapezoidal area equal the pairwise win rate with ties counted half.
// Labels must be 0 or 1 and both classes must appear.
RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

// Area restricted to fpr in [0, max_fpr], linearly interpolated at the cut.
// max_fpr must lie in (0, 1].
double partial_auc(const RocCurve& curve, double max_fpr);

struct ScoredInvariant {
  std::string group;  // method or project key
  double score = 0.0;
  int label = 0;
};

struct PerGroupEval {
  double mean_auc = 0.0;  // NaN when no group qualifies
  std::vector<std::pair<std::string, double>> per_group;  // sorted by key
  size_t skipped = 0;  // groups without both classes
};

// Unweighted mean AUC over groups that have at least one label of each
// class; single-class groups are counted in `skipped` and excluded.
PerGroupEval per_method_eval(const std::vector<ScoredInvariant>& scored);

// One pooled curve per project; single-class projects are omitted.
std::map<std::string, RocCurve> per_project_eval(const std::vector<ScoredInvariant>& scored);

// Columns fpr,tpr with a header row.
void write_roc_csv(const std::string& path, const RocCurve& curve);

}  // namespace forge::metrics
