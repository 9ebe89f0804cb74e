#pragma once

// Run manifest: every artifact-producing command writes one next to its
// outputs so a run can be reproduced from the recorded seeds and the
// effective configuration.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtcycle/config.hpp"
#include "rtcycle/errors.hpp"
#include "rtcycle/version.hpp"

namespace rtcycle {

struct RunManifest {
    std::string tool_version = kVersion;
    std::string command;
    std::uint64_t config_hash = 0;
    std::string effective_config;
    std::uint64_t seed = 0;
    std::vector<std::string> input_paths;
    std::vector<std::string> output_paths;
    std::string timestamp_utc;
};

inline std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&tt, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline RunManifest make_manifest(const std::string& command, const EngineConfig& cfg,
                                 std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.effective_config = serialize_config(cfg);
    m.config_hash = fnv1a_hash(m.effective_config);
    m.seed = seed;
    m.timestamp_utc = utc_timestamp_now();
    return m;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["effective_config"] = m.effective_config;
    j["seed"] = m.seed;
    j["inputs"] = m.input_paths;
    j["outputs"] = m.output_paths;
    j["timestamp_utc"] = m.timestamp_utc;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot write manifest '" + path + "'");
    out << j.dump(2) << "\n";
}

} // namespace rtcycle
