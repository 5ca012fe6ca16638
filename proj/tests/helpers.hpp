#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "lapsekit/dataset.hpp"

namespace lapsekit::test {

/// Compact table construction for unit tests.
struct TableBuilder {
    std::vector<ColumnDesc> descs;
    std::vector<Column> cols;

    TableBuilder& num(std::string name, std::vector<double> values,
                      std::vector<std::uint8_t> missing = {}) {
        NumColumn c;
        c.missing = missing.empty() ? std::vector<std::uint8_t>(values.size(), 0) : std::move(missing);
        c.values = std::move(values);
        descs.push_back({std::move(name), Role::numeric, {}});
        cols.emplace_back(std::move(c));
        return *this;
    }

    TableBuilder& cat(std::string name, std::vector<std::string> levels, std::vector<std::int32_t> codes) {
        descs.push_back({std::move(name), Role::categorical, std::move(levels)});
        cols.emplace_back(CatColumn{std::move(codes)});
        return *this;
    }

    TableBuilder& id(std::string name, std::vector<std::string> values) {
        descs.push_back({std::move(name), Role::identifier, {}});
        cols.emplace_back(IdColumn{std::move(values)});
        return *this;
    }

    TableBuilder& target(std::vector<int> values) {
        TargetColumn c;
        for (int v : values) c.values.push_back(static_cast<std::int8_t>(v));
        descs.push_back({"y", Role::target, {}});
        cols.emplace_back(std::move(c));
        return *this;
    }

    DataTable build() { return DataTable(FeatureSchema(std::move(descs)), std::move(cols)); }
};

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("lapsekit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::vector<std::int8_t> labels8(const std::vector<int>& y) {
    std::vector<std::int8_t> out;
    for (int v : y) out.push_back(static_cast<std::int8_t>(v));
    return out;
}

} // namespace lapsekit::test
