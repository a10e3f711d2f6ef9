#include "forge/trace/io.hpp"

#include <fstream>

#include "forge/error.hpp"

namespace forge::trace {

namespace {

SnapKind kind_from_name(const std::string& s, const std::string& where) {
  if (s == "int") return SnapKind::Int;
  if (s == "float") return SnapKind::Float;
  if (s == "string") return SnapKind::String;
  if (s == "object") return SnapKind::Object;
  if (s == "array") return SnapKind::Array;
  if (s == "null") return SnapKind::Null;
  throw FormatError(where, "unknown kind '" + s + "'");
}

Json snapshot_to_json(const ValueSnapshot& v, bool element) {
  Json j = Json::object();
  if (!element) j["path"] = v.path;
  j["kind"] = snap_kind_name(v.kind);
  switch (v.kind) {
    case SnapKind::Int: j["value"] = v.int_value; break;
    case SnapKind::Float: j["value"] = v.float_value; break;
    case SnapKind::String: j["value"] = v.string_value; break;
    case SnapKind::Object: j["value"] = v.object_id; break;
    case SnapKind::Array: {
      Json elems = Json::array();
      for (const ValueSnapshot& e : v.elements) elems.push_back(snapshot_to_json(e, true));
      j["value"] = std::move(elems);
      break;
    }
    case SnapKind::Null: break;  // kind=null carries no value
  }
  return j;
}

ValueSnapshot snapshot_from_json(const Json& j, const std::string& where, bool element) {
  if (!j.is_object()) throw FormatError(where, "snapshot is not an object");
  ValueSnapshot v;
  if (!element) {
    if (!j.contains("path") || !j["path"].is_string() || j["path"].get<std::string>().empty())
      throw FormatError(where, "snapshot missing path");
    v.path = j["path"].get<std::string>();
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw FormatError(where, "snapshot missing kind");
  v.kind = kind_from_name(j["kind"].get<std::string>(), where);
  bool has_value = j.contains("value");
  if (v.kind == SnapKind::Null) {
    if (has_value) throw FormatError(where, "null snapshot must not carry a value");
    return v;
  }
  if (!has_value) throw FormatError(where, "snapshot missing value");
  const Json& val = j["value"];
  switch (v.kind) {
    case SnapKind::Int:
      if (!val.is_number_integer()) throw FormatError(where, "int snapshot needs an integer");
      v.int_value = val.get<int64_t>();
      break;
    case SnapKind::Float:
      if (!val.is_number()) throw FormatError(where, "float snapshot needs a number");
      v.float_value = val.get<double>();
      break;
    case SnapKind::String:
      if (!val.is_string()) throw FormatError(where, "string snapshot needs a string");
      v.string_value = val.get<std::string>();
      break;
    case SnapKind::Object:
      if (!val.is_number_unsigned() && !val.is_number_integer())
        throw FormatError(where, "object snapshot needs an identity id");
      v.object_id = val.get<uint64_t>();
      break;
    case SnapKind::Array: {
      if (!val.is_array()) throw FormatError(where, "array snapshot needs an element list");
      SnapKind elem_kind = SnapKind::Null;
      bool seen_nonnull = false;
      for (const Json& e : val) {
        ValueSnapshot ev = snapshot_from_json(e, where, true);
        if (ev.kind == SnapKind::Array)
          throw FormatError(where, "array elements cannot be arrays");
        if (ev.kind != SnapKind::Null) {
          if (seen_nonnull && ev.kind != elem_kind)
            throw FormatError(where, "array elements must share one kind or be null");
          elem_kind = ev.kind;
          seen_nonnull = true;
        }
        v.elements.push_back(std::move(ev));
      }
      break;
    }
    case SnapKind::Null: break;
  }
  return v;
}

bool is_orig_path(const std::string& p) {
  return p.rfind("orig(", 0) == 0 && p.back() == ')';
}

}  // namespace

Json record_to_json(const TraceRecord& r) {
  Json j = Json::object();
  j["test"] = r.test;
  j["method"] = r.method;
  j["point"] = r.point == Point::Entry ? "entry" : "exit";
  j["call_index"] = r.call_index;
  Json vars = Json::array();
  for (const ValueSnapshot& v : r.vars) vars.push_back(snapshot_to_json(v, false));
  j["vars"] = std::move(vars);
  return j;
}

TraceRecord record_from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "record is not an object");
  for (const char* field : {"test", "method", "point", "call_index", "vars"})
    if (!v.contains(field))
      throw FormatError(where, std::string("record missing '") + field + "'");
  TraceRecord r;
  if (!v["test"].is_string() || !v["method"].is_string())
    throw FormatError(where, "test/method must be strings");
  r.test = v["test"].get<std::string>();
  r.method = v["method"].get<std::string>();
  std::string point = v["point"].is_string() ? v["point"].get<std::string>() : "";
  if (point == "entry")
    r.point = Point::Entry;
  else if (point == "exit")
    r.point = Point::Exit;
  else
    throw FormatError(where, "unknown point '" + point + "'");
  if (!v["call_index"].is_number_unsigned() && !v["call_index"].is_number_integer())
    throw FormatError(where, "call_index must be an integer");
  int64_t ci = v["call_index"].get<int64_t>();
  if (ci < 1) throw FormatError(where, "call_index must be positive");
  r.call_index = static_cast<uint64_t>(ci);
  if (!v["vars"].is_array()) throw FormatError(where, "vars must be a list");
  for (const Json& s : v["vars"])
    r.vars.push_back(snapshot_from_json(s, where, false));

  // Record-level invariants, checked on read so bad files fail closed.
  std::set<std::string> paths;
  bool has_return = false;
  for (const ValueSnapshot& s : r.vars) {
    if (!paths.insert(s.path).second)
      throw FormatError(where, "duplicate path '" + s.path + "'");
    if (s.path == "return") has_return = true;
    if (r.point == Point::Entry && (s.path == "return" || is_orig_path(s.path)))
      throw FormatError(where, "entry record carries exit-only path '" + s.path + "'");
  }
  if (r.point == Point::Exit && !has_return)
    throw FormatError(where, "exit record lacks 'return'");
  return r;
}

void write_records(const std::string& path, const std::vector<TraceRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path, "cannot open file for writing");
  for (const TraceRecord& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw FormatError(path, "write failed");
}

std::vector<TraceRecord> read_records(const std::string& path) {
  std::vector<TraceRecord> out;
  read_jsonl(path, [&](size_t lineno, const Json& v) {
    out.push_back(record_from_json(v, path + ":" + std::to_string(lineno)));
  });
  return out;
}

}  // namespace forge::trace
