#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "wkam/holonomic.hpp"
#include "wkam/lax_oleinik.hpp"
#include "wkam/limits.hpp"
#include "wkam/mfg.hpp"

namespace wkam {

/// 17 significant digits, '.' separator, locale independent.
std::string format_double(double x);

std::string grid_function_csv(const GridFunction& u, const std::string& column = "u");
std::string grid_measure_csv(const GridMeasure& m);
/// x..., v..., weight for every nonzero atom.
std::string phase_measure_csv(const PhaseMeasure& mu);
std::string aubry_csv(const AubryApproximation& aubry);
std::string sweep_csv(const SweepTable& table);

/// {"n", "values"} in grid index order.
nlohmann::json to_json(const GridFunction& u);
/// {"n", "weights"} in grid index order.
nlohmann::json to_json(const GridMeasure& m);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const MinimizingMeasureReport& report);
/// {"n", "tau", "window_radius", "weights", "atoms"}; weights point-major.
nlohmann::json to_json(const PhaseMeasure& mu);
nlohmann::json to_json(const MfgResiduals& residuals);
/// Everything but u, m and mu: reports, residuals, histories, version.
nlohmann::json to_json(const MfgSolution& solution);
nlohmann::json to_json(const SweepTable& table);

/// Writes bytes as given (LF line endings), creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// u.csv, m.csv, mu.json and report.json; `extra` is merged into the report.
void write_solution(const std::filesystem::path& dir, const MfgSolution& solution,
                    const nlohmann::json& extra = nlohmann::json::object());

}  // namespace wkam
