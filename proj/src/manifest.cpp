#include "lapsekit/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"

namespace lapsekit {

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["command"] = manifest.command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : manifest.config_echo) config[key] = value;
    doc["config"] = config;
    doc["master_seed"] = manifest.master_seed;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [file, digest] : manifest.inputs) inputs[file] = digest;
    doc["inputs"] = inputs;
    nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
    for (const auto& [file, digest] : manifest.outputs) outputs[file] = digest;
    doc["outputs"] = outputs;
    if (!manifest.extra.empty()) {
        nlohmann::ordered_json extra = nlohmann::ordered_json::object();
        for (const auto& [key, value] : manifest.extra) extra[key] = value;
        doc["extra"] = extra;
    }
    doc["toolkit_version"] = kToolkitVersion;
    doc["wall_seconds"] = manifest.wall_seconds;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

std::string file_digest(const std::string& path) {
    return hex64(fnv1a64_file(path));
}

} // namespace lapsekit
