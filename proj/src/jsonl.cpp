#include "forge/jsonl.hpp"

#include <fstream>

#include "forge/error.hpp"

namespace forge {

void read_jsonl(const std::string& path,
                const std::function<void(size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json v = Json::parse(line, nullptr, false);
    if (v.is_discarded())
      throw FormatError(path + ":" + std::to_string(lineno), "invalid JSON");
    fn(lineno, v);
  }
}

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path, "cannot open file for writing");
  for (const Json& r : records) out << r.dump() << '\n';
  if (!out) throw FormatError(path, "write failed");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  Json v = Json::parse(in, nullptr, false);
  if (v.is_discarded()) throw FormatError(path, "invalid JSON");
  return v;
}

void write_json_file(const std::string& path, const Json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path, "cannot open file for writing");
  out << value.dump(2) << '\n';
  if (!out) throw FormatError(path, "write failed");
}

}  // namespace forge
