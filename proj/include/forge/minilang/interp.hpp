#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "forge/minilang/parser.hpp"
#include "forge/trace/record.hpp"

namespace forge::minilang {

struct Obj;
struct Arr;

// Runtime value. Objects and arrays are heap references with stable identity
// ids, so aliasing and mutation behave like the reference semantics of the
// languages the tracer mimics.
struct Value {
  enum class Kind { Int, Float, Str, Null, Object, Array };
  Kind kind = Kind::Null;
  int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::shared_ptr<Obj> obj;
  std::shared_ptr<Arr> arr;

  static Value make_int(int64_t v);
  static Value make_float(double v);
  static Value make_str(std::string v);
  static Value make_null();
};

struct Obj {
  uint64_t id;
  std::vector<std::pair<std::string, Value>> fields;  // fixed at construction
  Value* find(const std::string& name);
};

struct Arr {
  uint64_t id;
  std::vector<Value> elems;
};

// Where emitted trace records go. One sink per program run.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_record(trace::TraceRecord record) = 0;
};

class CollectingSink : public TraceSink {
 public:
  void on_record(trace::TraceRecord record) override {
    records.push_back(std::move(record));
  }
  std::vector<trace::TraceRecord> records;
};

struct TestResult {
  std::string test;
  bool passed = false;
  std::string error;  // empty when passed
};

struct ExecutionReport {
  std::vector<TestResult> results;            // in executed (sorted) order
  std::map<std::string, uint64_t> calls;      // per core method, total
  std::map<std::string, uint64_t> traced;     // per core method, traced
  uint64_t seed = 0;

  size_t failures() const;
};

// Executes the selected tests in name order. Each call to a core function
// bumps that method's per-run call counter; calls passing sample_decision
// emit an entry record and, at return, an exit record holding the current
// parameter snapshots, orig(...) mirrors of the entry snapshots, and the
// return value. A RuntimeError fails its test and execution moves on.
// Raises ForgeError when selected names are not tests of the program.
ExecutionReport run_tests(const Program& program,
                          const std::set<std::string>& selected,
                          TraceSink& sink, uint64_t seed);

}  // namespace forge::minilang
