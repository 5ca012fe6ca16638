#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lapsekit {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Reproducibility record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
    std::vector<std::pair<std::string, std::string>> outputs; // path -> digest
    std::vector<std::pair<std::string, std::string>> extra;   // e.g. the selected best spec
    double wall_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

/// FNV-1a digest of a file, hex encoded.
std::string file_digest(const std::string& path);

} // namespace lapsekit
