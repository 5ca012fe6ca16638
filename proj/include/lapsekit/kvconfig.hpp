#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lapsekit {

/// Line-oriented `key = value` file: '#' starts a comment, blank lines are
/// skipped, keys may repeat (order preserved).
std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path);

std::vector<std::string> split_list(const std::string& value, char sep = ',');

double kv_double(const std::string& key, const std::string& value);
long long kv_int(const std::string& key, const std::string& value);

} // namespace lapsekit
