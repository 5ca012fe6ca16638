#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lapsekit {

/// Shortest round-trip decimal form (dot separator, never locale-dependent).
std::string format_double(double v);

/// Strict double parse of a whole field.
double parse_double(const std::string& field, const std::string& context);

/// Minimal RFC-4180-ish reader: comma separator, optional double quotes,
/// CRLF tolerated. Returns one vector of fields per row, blank lines skipped.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows);

std::string csv_line(const std::vector<std::string>& fields);

/// FNV-1a 64 over a byte stream; used for schema and run-manifest digests.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

} // namespace lapsekit
