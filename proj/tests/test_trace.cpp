#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "forge/error.hpp"
#include "forge/rng.hpp"
#include "forge/trace/io.hpp"
#include "forge/trace/record.hpp"

using namespace forge;
using namespace forge::trace;

namespace {

// Random but invariant-respecting records for round-trip checks.
std::vector<TraceRecord> random_records(Lcg64& rng, size_t n) {
  std::vector<TraceRecord> out;
  for (size_t i = 0; i < n; ++i) {
    TraceRecord r;
    r.test = "test_" + std::to_string(rng.next_below(5));
    r.method = "m" + std::to_string(rng.next_below(4));
    r.point = rng.next_below(2) ? Point::Exit : Point::Entry;
    r.call_index = 1 + rng.next_below(1000);
    size_t nvars = 1 + rng.next_below(4);
    for (size_t v = 0; v < nvars; ++v) {
      ValueSnapshot s;
      s.path = "p" + std::to_string(v);
      switch (rng.next_below(6)) {
        case 0:
          s.kind = SnapKind::Int;
          s.int_value = static_cast<int64_t>(rng.next_u64());
          break;
        case 1: {
          s.kind = SnapKind::Float;
          // Exercise the full double range, including tiny and huge values.
          uint64_t bits = rng.next_u64();
          double d;
          static_assert(sizeof d == sizeof bits);
          std::memcpy(&d, &bits, sizeof d);
          if (std::isnan(d) || std::isinf(d)) d = 0.25;
          s.float_value = d;
          break;
        }
        case 2:
          s.kind = SnapKind::String;
          s.string_value = std::string(rng.next_below(8), 'a' + (char)rng.next_below(26));
          break;
        case 3:
          s.kind = SnapKind::Object;
          s.object_id = rng.next_u64() % 1000;
          break;
        case 4: {
          s.kind = SnapKind::Array;
          size_t len = rng.next_below(4);
          for (size_t e = 0; e < len; ++e) {
            ValueSnapshot es;
            if (rng.next_below(4) == 0) {
              es.kind = SnapKind::Null;
            } else {
              es.kind = SnapKind::Int;
              es.int_value = (int64_t)rng.next_below(100);
            }
            s.elements.push_back(es);
          }
          break;
        }
        default:
          s.kind = SnapKind::Null;
          break;
      }
      r.vars.push_back(std::move(s));
    }
    if (r.point == Point::Exit) {
      ValueSnapshot ret;
      ret.path = "return";
      ret.kind = SnapKind::Int;
      ret.int_value = 7;
      r.vars.push_back(ret);
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("trace io: write-read round-trips 1000 random records exactly") {
  Lcg64 rng(2024);
  auto records = random_records(rng, 1000);
  TempFile f("forge_roundtrip.trace");
  write_records(f.path, records);
  auto back = read_records(f.path);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) REQUIRE(back[i] == records[i]);
}

TEST_CASE("trace io: empty file reads as empty list") {
  TempFile f("forge_empty.trace");
  write_records(f.path, {});
  CHECK(read_records(f.path).empty());
}

TEST_CASE("trace io: floats survive shortest round-trip serialization") {
  TraceRecord r;
  r.test = "t";
  r.method = "m";
  r.point = Point::Entry;
  r.call_index = 1;
  double values[] = {0.1, 1.0 / 3.0, 1e-300, 1e300, 1234567890.12345, -0.0, 5e-324};
  int i = 0;
  for (double d : values) {
    ValueSnapshot s;
    s.path = "v" + std::to_string(i++);
    s.kind = SnapKind::Float;
    s.float_value = d;
    r.vars.push_back(s);
  }
  TempFile f("forge_floats.trace");
  write_records(f.path, {r});
  auto back = read_records(f.path);
  REQUIRE(back.size() == 1);
  for (size_t v = 0; v < r.vars.size(); ++v) {
    double a = r.vars[v].float_value, b = back[0].vars[v].float_value;
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST_CASE("trace io: rejects malformed lines fail-closed") {
  TempFile f("forge_bad.trace");
  auto write_raw = [&](const std::string& text) {
    std::ofstream out(f.path, std::ios::trunc);
    out << text;
  };

  write_raw(R"({"test":"t","method":"m","point":"sideways","call_index":1,"vars":[]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw(R"({"test":"t","method":"m","point":"entry","call_index":1,"vars":[)"
            R"({"path":"x","kind":"int","value":1},{"path":"x","kind":"int","value":2}]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw(R"({"test":"t","method":"m","point":"exit","call_index":1,"vars":[]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw(R"({"test":"t","method":"m","point":"entry","call_index":1,"vars":[)"
            R"({"path":"return","kind":"int","value":1}]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw(R"({"test":"t","method":"m","point":"entry","call_index":1,"vars":[)"
            R"({"path":"a","kind":"array","value":[{"kind":"int","value":1},{"kind":"string","value":"x"}]}]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw(R"({"test":"t","method":"m","point":"entry","call_index":1,"vars":[)"
            R"({"path":"x","kind":"null","value":3}]})"
            "\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);

  write_raw("not json\n");
  CHECK_THROWS_AS(read_records(f.path), FormatError);
}

TEST_CASE("compose_split concatenates in sorted test order") {
  std::map<std::string, std::vector<TraceRecord>> per_test;
  auto mk = [](const std::string& test, int n) {
    std::vector<TraceRecord> v;
    for (int i = 0; i < n; ++i) {
      TraceRecord r;
      r.test = test;
      r.method = "m";
      r.point = Point::Entry;
      r.call_index = static_cast<uint64_t>(i + 1);
      ValueSnapshot s;
      s.path = "x";
      s.kind = SnapKind::Int;
      s.int_value = i;
      r.vars.push_back(s);
      v.push_back(r);
    }
    return v;
  };
  per_test["test_b"] = mk("test_b", 2);
  per_test["test_a"] = mk("test_a", 3);

  SplitTraces st = compose_split(per_test, {"test_a", "test_b"});
  REQUIRE(st.records.size() == 5);
  for (int i = 0; i < 3; ++i) CHECK(st.records[i].test == "test_a");
  for (int i = 3; i < 5; ++i) CHECK(st.records[i].test == "test_b");

  SplitTraces empty = compose_split(per_test, {});
  CHECK(empty.records.empty());

  CHECK_THROWS_AS(compose_split(per_test, {"test_zzz"}), MissingTrace);
}

TEST_CASE("compose_split is insensitive to map population order") {
  std::map<std::string, std::vector<TraceRecord>> a, b;
  for (const char* name : {"test_c", "test_a", "test_b"}) {
    TraceRecord r;
    r.test = name;
    r.method = "m";
    r.point = Point::Entry;
    r.call_index = 1;
    ValueSnapshot s;
    s.path = "x";
    s.kind = SnapKind::Null;
    r.vars.push_back(s);
    a[name] = {r};
  }
  for (const char* name : {"test_b", "test_c", "test_a"}) b[name] = a[name];

  auto sa = compose_split(a, {"test_a", "test_b", "test_c"});
  auto sb = compose_split(b, {"test_a", "test_b", "test_c"});
  REQUIRE(sa.records.size() == sb.records.size());
  for (size_t i = 0; i < sa.records.size(); ++i)
    CHECK(record_to_json(sa.records[i]).dump() == record_to_json(sb.records[i]).dump());
}
