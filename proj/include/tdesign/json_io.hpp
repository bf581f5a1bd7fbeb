#pragma once

// Report serialization and run manifests shared by the command-line tool.

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tdesign/architecture.hpp"
#include "tdesign/cluster_graph.hpp"
#include "tdesign/errors.hpp"
#include "tdesign/spectral.hpp"

namespace tdesign {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunManifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::map<std::string, std::string> parameters;
    std::optional<std::uint64_t> seed;
    std::string version = kToolVersion;
    std::string timestamp;  // excluded from the determinism contract
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["subcommand"] = m.subcommand;
    j["inputs"] = m.inputs;
    auto& p = j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.parameters) p[k] = v;
    j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
    j["tool_version"] = m.version;
    j["timestamp"] = m.timestamp;
    return j;
}

inline nlohmann::ordered_json to_json(const SingularReport& r) {
    nlohmann::ordered_json j;
    j["ssv"] = r.ssv;
    j["unit_dim"] = r.unit_dim;
    j["method"] = to_string(r.method);
    j["residual"] = r.residual;
    j["dim"] = r.dim;
    j["matvecs"] = r.matvecs;
    return j;
}

inline nlohmann::ordered_json to_json(const FramePotentialEstimate& f) {
    return {{"estimate", f.estimate}, {"std_error", f.std_error}, {"samples", f.samples}};
}

inline nlohmann::ordered_json to_json(const EulerReduction& e) {
    nlohmann::ordered_json j;
    j["loop_sizes"] = e.loop_sizes;
    auto& tr = j["trace"] = nlohmann::ordered_json::array();
    for (const auto& s : e.trace) tr.push_back(to_json(s));
    j["result"] = to_json(e.result);
    return j;
}

inline nlohmann::ordered_json to_json(const BlockDecomposition& d) {
    nlohmann::ordered_json j;
    auto& b = j["blocks"] = nlohmann::ordered_json::array();
    for (const auto& blk : d.blocks) b.push_back({{"start", blk.start}, {"end", blk.end}, {"size", blk.size}});
    auto& in = j["interstitial"] = nlohmann::ordered_json::array();
    for (const auto& [s, e] : d.interstitial) in.push_back({s, e});
    j["k"] = d.count();
    const auto m = d.mean_block_size();
    j["ell_bar"] = m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr);
    j["count_merging_only"] = d.count_merging_only;
    return j;
}

/// Writes through a temporary file in the target directory and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw InvalidInput("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InvalidInput("cannot move output into place: " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tdesign
