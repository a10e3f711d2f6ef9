#pragma once

#include <cstdint>

#include "forge/error.hpp"
#include <map>
#include <set>
#include <string>
#include <vector>

namespace forge::trace {

enum class SnapKind { Int, Float, String, Object, Array, Null };

const char* snap_kind_name(SnapKind k);

// One variable observation at a program point. Scalars carry their value,
// objects carry an identity id, arrays carry per-element snapshots (path
// empty on elements). kind=Null carries nothing.
struct ValueSnapshot {
  std::string path;
  SnapKind kind = SnapKind::Null;
  int64_t int_value = 0;
  double float_value = 0.0;
  std::string string_value;
  uint64_t object_id = 0;
  std::vector<ValueSnapshot> elements;

  bool operator==(const ValueSnapshot&) const = default;
};

enum class Point { Entry, Exit };

struct TraceRecord {
  std::string test;
  std::string method;
  Point point = Point::Entry;
  uint64_t call_index = 1;
  std::vector<ValueSnapshot> vars;

  const ValueSnapshot* find(const std::string& path) const;

  bool operator==(const TraceRecord&) const = default;
};

// Traces of the tests making up one cross-validation split, in emission
// order within each test and sorted test order across tests.
struct SplitTraces {
  int split_id = 0;
  std::set<std::string> tests;
  std::vector<TraceRecord> records;
};

class MissingTrace : public ForgeError {
 public:
  explicit MissingTrace(const std::string& test)
      : ForgeError("no trace for test '" + test + "'") {}
};

// Concatenates the selected tests' records in sorted test-name order.
SplitTraces compose_split(const std::map<std::string, std::vector<TraceRecord>>& per_test,
                          const std::set<std::string>& tests, int split_id = 0);

}  // namespace forge::trace
