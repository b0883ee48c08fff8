#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "xva/default_clock.hpp"
#include "xva/grid_function.hpp"
#include "xva/simulate.hpp"
#include "xva/valuation.hpp"

namespace xva::app {

/// Shortest round-trip decimal form (%.17g).
std::string fmt(double value);

void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

/// path_id,t,x,v per recorded node of every valid path.
void write_paths_csv(const std::string& path, const PathSet& paths);

/// Header (magic, seed, grid, scheme, stride, shape, recorded steps) then x and v blocks.
void write_paths_bin(const std::string& path, const PathSet& paths);

struct GridData {
    GridFunction u;
    std::vector<double> stderr_;
};

/// t,x,v,u,stderr with x varying fastest.
void write_grid_csv(const std::string& path, const GridFunction& u, const std::vector<double>& stderr_);
GridData read_grid_csv(const std::string& path);

void write_grid_bin(const std::string& path, const GridFunction& u, const std::vector<double>& stderr_);
GridData read_grid_bin(const std::string& path);

void write_residuals_csv(const std::string& path, const ResidualReport& report);

} // namespace xva::app
