#pragma once

#include <functional>
#include <string>

#include <json.hpp>

namespace forge {

using Json = nlohmann::ordered_json;

// Reads a line-delimited JSON file, invoking fn(line_number, value) per
// non-empty line. Raises FormatError(path:line) on unparsable lines or a
// missing file.
void read_jsonl(const std::string& path,
                const std::function<void(size_t, const Json&)>& fn);

// Writes records as one JSON object per line. Overwrites. Raises
// FormatError if the file cannot be opened.
void write_jsonl(const std::string& path, const std::vector<Json>& records);

// Whole-file JSON value (for configs and checkpoints).
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);

}  // namespace forge
