#include "lapsekit/kvconfig.hpp"

#include <charconv>
#include <fstream>

#include "lapsekit/error.hpp"

namespace lapsekit {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string entry = trim(line);
        if (entry.empty()) continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' at " + path + ":" + std::to_string(line_no));
        }
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at " + path + ":" + std::to_string(line_no));
        entries.emplace_back(std::move(key), std::move(value));
    }
    return entries;
}

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double kv_double(const std::string& key, const std::string& value) {
    double v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
    }
    return v;
}

long long kv_int(const std::string& key, const std::string& value) {
    long long v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw ConfigError("key '" + key + "': cannot parse integer '" + value + "'");
    }
    return v;
}

} // namespace lapsekit
