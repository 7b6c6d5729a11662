#include "wkam/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wkam/errors.hpp"
#include "wkam/version.hpp"

namespace wkam {

namespace {

std::string point_columns(const TorusGrid& grid, const Point& x) {
  std::string out = format_double(x[0]);
  if (grid.dim() == 2) out += "," + format_double(x[1]);
  return out;
}

std::string coordinate_header(int dim, const char* prefix) {
  return dim == 1 ? std::string(prefix) : std::string(prefix) + "0," + prefix + "1";
}

nlohmann::json point_json(int dim, const Point& x) {
  auto j = nlohmann::json::array({x[0]});
  if (dim == 2) j.push_back(x[1]);
  return j;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string grid_function_csv(const GridFunction& u, const std::string& column) {
  const TorusGrid& grid = u.grid();
  std::ostringstream out;
  out << coordinate_header(grid.dim(), "x") << ',' << column << '\n';
  for (std::size_t i = 0; i < u.size(); ++i) out << point_columns(grid, grid.point(i)) << ',' << format_double(u[i]) << '\n';
  return out.str();
}

std::string grid_measure_csv(const GridMeasure& m) {
  return grid_function_csv(GridFunction(m.grid(), m.weights()), "m");
}

std::string phase_measure_csv(const PhaseMeasure& mu) {
  const TorusGrid& grid = mu.grid();
  std::ostringstream out;
  out << coordinate_header(grid.dim(), "x") << ',' << coordinate_header(grid.dim(), "v") << ",weight\n";
  for (const auto& a : mu.atoms())
    out << point_columns(grid, grid.point(a.point)) << ',' << point_columns(grid, mu.window().velocity(a.slot)) << ','
        << format_double(a.weight) << '\n';
  return out.str();
}

std::string aubry_csv(const AubryApproximation& aubry) {
  const TorusGrid& grid = aubry.window.grid();
  std::ostringstream out;
  out << coordinate_header(grid.dim(), "x") << ',' << coordinate_header(grid.dim(), "v") << ",frequency\n";
  for (const auto& a : aubry.atoms)
    out << point_columns(grid, grid.point(a.point)) << ',' << point_columns(grid, aubry.window.velocity(a.slot)) << ','
        << format_double(a.frequency) << '\n';
  return out.str();
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "param,u_ref0,u_ref1,u_ref2,u_ref3,sup_cauchy,d1_cauchy,lbar_or_c,hjb_res,holo_res,coupling_gap,seconds\n";
  for (const auto& r : table.rows) {
    out << format_double(r.param);
    for (double v : r.u_ref) out << ',' << format_double(v);
    for (double v : {r.sup_cauchy, r.d1_cauchy, r.lbar_or_c, r.hjb_res, r.holo_res, r.coupling_gap, r.seconds})
      out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const GridFunction& u) {
  return {{"dim", u.grid().dim()}, {"n", u.grid().n()}, {"values", std::vector<double>(u.values().begin(), u.values().end())}};
}

nlohmann::json to_json(const GridMeasure& m) {
  return {{"dim", m.grid().dim()}, {"n", m.grid().n()}, {"weights", m.weights()}};
}

nlohmann::json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"residual_history", r.residual_history},
          {"contraction_estimates", r.contraction_estimates},
          {"c0", r.c0},
          {"c0_bound", r.c0_bound},
          {"lbar", r.lbar},
          {"ergodic", r.ergodic},
          {"window_radius", r.window_radius},
          {"boundary_argmins", r.boundary_argmins},
          {"escalations", r.escalations},
          {"converged", r.converged}};
}

nlohmann::json to_json(const MinimizingMeasureReport& r) {
  return {{"holonomy_defect", r.holonomy_defect},
          {"value_defect", r.value_defect},
          {"burn_in", r.burn_in},
          {"orbit_length", r.orbit_length},
          {"tol_value", r.tol_value},
          {"tol_holonomy", r.tol_holonomy},
          {"minimizing", r.minimizing}};
}

nlohmann::json to_json(const PhaseMeasure& mu) {
  const int dim = mu.grid().dim();
  auto atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms())
    atoms.push_back({{"x", point_json(dim, mu.grid().point(a.point))},
                     {"v", point_json(dim, mu.window().velocity(a.slot))},
                     {"weight", a.weight}});
  return {{"dim", dim},
          {"n", mu.grid().n()},
          {"tau", mu.window().tau()},
          {"window_radius", mu.window().radius_steps()},
          {"weights", mu.weights()},
          {"atoms", atoms}};
}

nlohmann::json to_json(const MfgResiduals& r) {
  return {{"hjb", r.hjb},
          {"hjb_fd", r.hjb_fd},
          {"holonomy", r.holonomy},
          {"continuity", r.continuity},
          {"continuity_bound", r.continuity_bound},
          {"coupling_gap", r.coupling_gap}};
}

nlohmann::json to_json(const MfgSolution& s) {
  return {{"version", std::string(version_string())},
          {"ergodic", s.ergodic},
          {"converged", s.converged},
          {"outer_iterations", s.outer_iterations},
          {"updates", s.updates},
          {"damping", s.damping},
          {"d1_history", s.d1_history},
          {"residuals", to_json(s.residuals)},
          {"solve_report", to_json(s.solve_report)},
          {"measure_report", to_json(s.measure_report)},
          {"u_sup_norm", s.u.sup_norm()}};
}

nlohmann::json to_json(const SweepTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"param", r.param},
                    {"sup_norm", finite_or_null(r.sup_norm)},
                    {"window_radius", r.window_radius},
                    {"converged", r.converged},
                    {"error", r.error}});
  nlohmann::json out = {{"version", std::string(version_string())}, {"kind", t.kind}, {"rows", rows}};
  if (t.ergodic)
    out["ergodic_comparison"] = {{"gauge_distance", finite_or_null(t.ergodic->gauge_distance)},
                                 {"d1", finite_or_null(t.ergodic->d1)},
                                 {"lbar", finite_or_null(t.ergodic->lbar)},
                                 {"converged", t.ergodic->converged},
                                 {"error", t.ergodic->error}};
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_solution(const std::filesystem::path& dir, const MfgSolution& solution, const nlohmann::json& extra) {
  write_text(dir / "u.csv", grid_function_csv(solution.u));
  write_text(dir / "m.csv", grid_measure_csv(solution.m));
  write_json(dir / "mu.json", to_json(solution.mu));
  nlohmann::json report = to_json(solution);
  report.update(extra);
  write_json(dir / "report.json", report);
}

}  // namespace wkam
