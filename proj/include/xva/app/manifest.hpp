#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace xva::app {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Output directory of one run. A run.incomplete marker exists from
/// construction until finish(); on failure it keeps the error text.
class RunDirectory {
public:
    RunDirectory(std::string dir, std::string command, const nlohmann::json& normalized_config);

    std::string path(const std::string& name) const;
    void add_output(const std::string& name) { outputs_.push_back(name); }
    void add_seed(const std::string& label, std::uint64_t seed) { seeds_[label] = seed; }
    void set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

    /// Writes manifest.json (last) and removes the marker.
    void finish(int threads);
    void fail(const std::string& message) const;

private:
    std::string dir_;
    std::string command_;
    nlohmann::json config_;
    std::string config_sha_;
    std::vector<std::string> outputs_;
    std::map<std::string, std::uint64_t> seeds_;
    nlohmann::json extra_ = nlohmann::json::object();
    std::chrono::steady_clock::time_point start_;
};

} // namespace xva::app
