#include "forge/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace forge::metrics {

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw ForgeError("roc: scores and labels differ in length");
  size_t pos = 0, neg = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw ForgeError("roc: labels must be 0 or 1");
    (l ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) throw SingleClass("roc");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1;
      ++j;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }

  for (size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

double partial_auc(const RocCurve& curve, double max_fpr) {
  if (!(max_fpr > 0.0) || max_fpr > 1.0)
    throw ForgeError("partial_auc: max_fpr must lie in (0, 1]");
  double area = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    if (a.fpr >= max_fpr) break;
    if (b.fpr <= max_fpr) {
      area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
      continue;
    }
    double cut_tpr = a.tpr + (b.tpr - a.tpr) * (max_fpr - a.fpr) / (b.fpr - a.fpr);
    area += (max_fpr - a.fpr) * (a.tpr + cut_tpr) / 2.0;
    break;
  }
  return area;
}

namespace {

std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> group_by(
    const std::vector<ScoredInvariant>& scored) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> groups;
  for (const ScoredInvariant& s : scored) {
    groups[s.group].first.push_back(s.score);
    groups[s.group].second.push_back(s.label);
  }
  return groups;
}

bool both_classes(const std::vector<int>& labels) {
  bool p = false, n = false;
  for (int l : labels) (l ? p : n) = true;
  return p && n;
}

}  // namespace

PerGroupEval per_method_eval(const std::vector<ScoredInvariant>& scored) {
  PerGroupEval eval;
  for (const auto& [name, data] : group_by(scored)) {
    if (!both_classes(data.second)) {
      eval.skipped += 1;
      continue;
    }
    eval.per_group.emplace_back(name, roc(data.first, data.second).auc);
  }
  if (eval.per_group.empty()) {
    eval.mean_auc = std::numeric_limits<double>::quiet_NaN();
    return eval;
  }
  double sum = 0.0;
  for (const auto& [name, auc] : eval.per_group) sum += auc;
  eval.mean_auc = sum / static_cast<double>(eval.per_group.size());
  return eval;
}

std::map<std::string, RocCurve> per_project_eval(const std::vector<ScoredInvariant>& scored) {
  std::map<std::string, RocCurve> out;
  for (const auto& [name, data] : group_by(scored)) {
    if (!both_classes(data.second)) continue;
    out[name] = roc(data.first, data.second);
  }
  return out;
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) throw FormatError(path, "cannot open for writing");
  out << "fpr,tpr\n";
  char row[64];
  for (const RocPoint& p : curve.points) {
    std::snprintf(row, sizeof(row), "%.17g,%.17g\n", p.fpr, p.tpr);
    out << row;
  }
  if (!out.flush()) throw FormatError(path, "write failed");
}

}  // namespace forge::metrics
