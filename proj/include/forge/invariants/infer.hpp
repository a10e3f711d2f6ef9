#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/invariants/invariant.hpp"
#include "forge/trace/record.hpp"

namespace forge::inv {

struct InferenceConfig {
  int min_support = 5;
  int flatten_depth = 2;  // informational; snapshots are produced at depth 2
};

// What was observed at each path of one (method, point): the snapshot kinds,
// any string values, and for arrays the element kinds and string values.
// Candidate enumeration is a pure function of this.
struct PathInfo {
  std::set<trace::SnapKind> kinds;
  std::set<std::string> literals;
  std::set<trace::SnapKind> elem_kinds;
  std::set<std::string> elem_literals;
};

struct Schema {
  std::string method;
  trace::Point point = trace::Point::Entry;
  std::map<std::string, PathInfo> paths;
};

class NoObservations : public ForgeError {
 public:
  NoObservations(const std::string& method, trace::Point point)
      : ForgeError("no records for " + method +
                   (point == trace::Point::Entry ? " at entry" : " at exit")) {}
};

class UnresolvableTerm : public ForgeError {
 public:
  explicit UnresolvableTerm(const std::string& path)
      : ForgeError("term path '" + path + "' never observed for this method") {}
};

Schema build_schema(const std::vector<const trace::TraceRecord*>& records,
                    const std::string& method, trace::Point point);

// The finite candidate universe over the schema's terms and the constant
// pool, in a fixed deterministic order: per-path families (nullity, string
// equality, numeric bounds, length bounds, element predicates) in path
// order, then reference-equality pairs, containment pairs, and relational
// pairs over numeric terms.
std::vector<Invariant> enumerate_candidates(const Schema& schema);

// Raises UnresolvableTerm if a term of inv names a path absent from the
// schema (as opposed to present-but-null, which simply evaluates false).
void check_resolvable(const Invariant& inv, const Schema& schema);

// Strongest invariants holding on every record of (method, point) in the
// split, provided at least cfg.min_support records exist (otherwise the
// empty set). An invariant is dropped when another returned one implies it.
// Raises NoObservations when there are no records at all.
std::vector<Invariant> infer(const trace::SplitTraces& traces, const std::string& method,
                             trace::Point point, const InferenceConfig& cfg);

// All (method, point) pairs with at least one record, sorted.
std::vector<std::pair<std::string, trace::Point>> method_points(
    const std::vector<trace::TraceRecord>& records);

}  // namespace forge::inv
