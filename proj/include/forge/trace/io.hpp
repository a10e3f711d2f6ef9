#pragma once

#include <string>
#include <vector>

#include "forge/jsonl.hpp"
#include "forge/trace/record.hpp"

namespace forge::trace {

Json record_to_json(const TraceRecord& r);
TraceRecord record_from_json(const Json& v, const std::string& where);

// Line-delimited records, stable field order, shortest round-trip floats.
void write_records(const std::string& path, const std::vector<TraceRecord>& records);

// Fail-closed: any line violating record invariants (unknown point or kind,
// duplicate paths, orig()/return at entry, exit without return, mixed-kind
// array elements) raises FormatError naming the offending line.
std::vector<TraceRecord> read_records(const std::string& path);

}  // namespace forge::trace
