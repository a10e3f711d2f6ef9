#include "forge/trace/record.hpp"

#include "forge/error.hpp"

namespace forge::trace {

const char* snap_kind_name(SnapKind k) {
  switch (k) {
    case SnapKind::Int: return "int";
    case SnapKind::Float: return "float";
    case SnapKind::String: return "string";
    case SnapKind::Object: return "object";
    case SnapKind::Array: return "array";
    case SnapKind::Null: return "null";
  }
  return "unknown";
}

const ValueSnapshot* TraceRecord::find(const std::string& path) const {
  for (const ValueSnapshot& v : vars)
    if (v.path == path) return &v;
  return nullptr;
}

SplitTraces compose_split(const std::map<std::string, std::vector<TraceRecord>>& per_test,
                          const std::set<std::string>& tests, int split_id) {
  SplitTraces out;
  out.split_id = split_id;
  out.tests = tests;
  // std::set iterates in sorted order, which fixes the concatenation order
  // independent of how the map was populated.
  for (const std::string& t : tests) {
    auto it = per_test.find(t);
    if (it == per_test.end()) throw MissingTrace(t);
    out.records.insert(out.records.end(), it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace forge::trace
