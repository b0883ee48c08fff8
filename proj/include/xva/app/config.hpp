#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "xva/mild_solver.hpp"
#include "xva/valuation.hpp"
#include "xva/vol_model.hpp"

namespace xva::app {

/// Config validation failure; `path()` is the offending field, e.g. "market.alpha_frac".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class Preset { black_scholes, heston, garch, power };

struct ModelConfig {
    Preset preset = Preset::heston;
    PowerModel params; // horizon filled from the grid
    double s0 = 100.0;
    double v0 = 0.04;
};

struct GridConfig {
    double t0 = 0.0;
    double T = 1.0;
    int n_steps = 500;
    int nt = 6;
    int nx = 41;
    int nv = 9;
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> v_range;
};

struct McSection {
    std::size_t n_paths = 4000;
    std::uint64_t master_seed = 42;
    int node_steps = 20;
    double coverage_limit = 0.01;
    std::size_t hull_paths = 2000;
    std::size_t residual_paths = 10000;
    int residual_steps = 200;
    std::size_t simulate_paths = 1000;
    int record_stride = 1;
    std::size_t default_samples = 100000;
    bool check_defaults_mc = true;
    std::size_t oracle_paths = 20000;
};

struct SolverSection {
    int max_iter = 30;
    double tol = 1e-6;
    double gamma = 0.0;
    int time_slabs = 1;
    double slab_budget = 0.5;
    bool stop_at_noise_floor = true;
    bool fresh_validation = true;
    bool monotone_shift = true;
};

struct RunConfig {
    ModelConfig model;
    MarketSpec market;
    GridConfig grid;
    McSection mc;
    SolverSection solver;
};

std::string to_string(Preset preset);

/// Strict load: unknown keys and invalid values raise ConfigError. The
/// Feller-type positivity condition is not part of loading.
RunConfig load_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

/// Normalised form: every field explicit, presets reduced to their own keys.
nlohmann::json to_json(const RunConfig& config);

/// Physical-measure model.
VolModel physical_model(const RunConfig& config, bool require_positivity = true);

/// Pricing-measure model: drift r, variance drift adjusted by gamma.
VolModel pricing_model(const RunConfig& config, bool require_positivity = true);

PositivityReport positivity(const RunConfig& config);

McConfig mc_config(const RunConfig& config);
SolverConfig solver_config(const RunConfig& config);

/// Solver grid from the config; missing ranges come from a pilot run.
SolverGrid solver_grid(const RunConfig& config, const VolModel& model_Q);

} // namespace xva::app
