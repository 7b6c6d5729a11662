#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wkam/errors.hpp"
#include "wkam/io.hpp"
#include "wkam/limits.hpp"
#include "wkam/mfg.hpp"
#include "wkam/parallel.hpp"
#include "wkam/version.hpp"

namespace wkam::cli {

namespace {

using nlohmann::json;

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

double number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing required key \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t count(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Point point(const json& v, int dim, const std::string& where) {
  const auto xs = numbers(v, where);
  if (static_cast<int>(xs.size()) != dim) throw ConfigError(where + ": expected " + std::to_string(dim) + " coordinates");
  Point p{0.0, 0.0};
  for (int a = 0; a < dim; ++a) p[a] = xs[a];
  return p;
}

Potential parse_potential(const json& obj, const TorusGrid& grid, const std::string& where) {
  allow_keys(obj, where, {"kind", "value", "values", "shift"});
  const std::string kind = text(obj, "kind", where, "sin2pi");
  Potential g = [&] {
    if (kind == "sin2pi") return sin2pi_potential();
    if (kind == "twowell") return twowell_potential();
    if (kind == "constant") return constant_potential(number(obj, "value", where));
    if (kind == "table") {
      if (!obj.contains("values")) throw ConfigError(where + ": table potential needs \"values\"");
      auto values = numbers(obj.at("values"), where + ".values");
      if (values.size() != grid.size())
        throw ConfigError(where + ".values: expected " + std::to_string(grid.size()) + " entries");
      return table_potential(grid, std::move(values));
    }
    throw ConfigError(where + ".kind: unknown potential \"" + kind + "\"");
  }();
  const double offset = number(obj, "shift", where, 0.0);
  return offset == 0.0 ? g : shifted(std::move(g), offset);
}

LagrangianModel parse_lagrangian(const json& v, const TorusGrid& grid, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() == "quadratic") return quadratic_lagrangian(grid.dim());
    throw ConfigError(where + ": unknown Lagrangian \"" + v.get<std::string>() + "\"");
  }
  allow_keys(v, where, {"kind", "potential"});
  const std::string kind = text(v, "kind", where, "quadratic");
  if (kind == "quadratic") return quadratic_lagrangian(grid.dim());
  if (kind == "mechanical") {
    if (!v.contains("potential")) throw ConfigError(where + ": mechanical Lagrangian needs \"potential\"");
    return mechanical_lagrangian(grid.dim(), parse_potential(v.at("potential"), grid, where + ".potential"));
  }
  throw ConfigError(where + ".kind: unknown Lagrangian \"" + kind + "\"");
}

CouplingModel parse_coupling(const json& obj, const Potential& g, const std::string& where) {
  allow_keys(obj, where, {"kind", "f", "eps"});
  const std::string kind = text(obj, "kind", where, "additive");
  if (kind == "additive") return additive_coupling(number(obj, "f", where, 0.0), g);
  if (kind == "convolution") return convolution_coupling(shifted(g, number(obj, "f", where, 0.0)), number(obj, "eps", where));
  throw ConfigError(where + ".kind: unknown coupling \"" + kind + "\"");
}

GridMeasure parse_m_init(const json& obj, const TorusGrid& grid, std::uint64_t rng_seed) {
  allow_keys(obj, "m_init", {"kind", "at"});
  const std::string kind = text(obj, "kind", "m_init", "uniform");
  if (kind == "uniform") return GridMeasure::uniform(grid);
  if (kind == "delta") {
    if (!obj.contains("at")) throw ConfigError("m_init: delta needs \"at\"");
    return GridMeasure::dirac(grid, grid.nearest(point(obj.at("at"), grid.dim(), "m_init.at")));
  }
  if (kind == "random") {
    // Raw engine output keeps the weights identical across standard libraries.
    std::mt19937_64 rng(rng_seed);
    std::vector<double> w(grid.size());
    for (double& x : w) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 + 1e-3;
    return GridMeasure::normalized(grid, std::move(w));
  }
  throw ConfigError("m_init.kind: unknown kind \"" + kind + "\"");
}

std::pair<int, int> line_and_column(const std::string& s, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < s.size(); ++i) {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void validate_with(const ProblemSpec& base, double tau, double lambda) {
  ProblemSpec s = base;
  s.tau = tau;
  s.lambda = lambda;
  try {
    s.validate();
  } catch (const InvalidSpecError& e) {
    throw ConfigError(e.what());
  }
}

void prepare(const std::filesystem::path& out, const RunConfig& config) {
  std::filesystem::create_directories(out);
  write_text(out / "config_echo.json", config.text);
}

json value_report(const ValueSolution& sol, const HjbResidual& res, const std::string& mode) {
  return {{"version", std::string(version_string())},
          {"mode", mode},
          {"converged", sol.report.converged},
          {"u_sup_norm", sol.u.sup_norm()},
          {"hjb_residual", {{"discrete", res.discrete}, {"finite_difference", res.finite_difference}}},
          {"solve_report", to_json(sol.report)}};
}

int divergence(const DivergenceError& e, const std::filesystem::path& out, std::ostream& log) {
  write_json(out / "report.json", {{"version", std::string(version_string())},
                                   {"converged", false},
                                   {"error", e.what()},
                                   {"residual_history", e.history()}});
  log << "not converged: " << e.what() << "\n";
  const auto& h = e.history();
  const std::size_t shown = std::min<std::size_t>(h.size(), 10);
  log << "last residuals:";
  for (std::size_t i = h.size() - shown; i < h.size(); ++i) log << ' ' << format_double(h[i]);
  log << "\n";
  return kNotConverged;
}

}  // namespace

RunConfig parse_config(const std::string& input) {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(input, e.byte);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
  allow_keys(doc, "config",
             {"schema", "grid", "tau", "lambda", "window", "model", "solver", "seeds", "m_init", "rng_seed", "hjb",
              "sweep", "nonuniq", "record_timing"});
  if (!doc.contains("schema") || doc.at("schema") != 1) throw ConfigError("config: \"schema\" must be 1");

  if (!doc.contains("grid")) throw ConfigError("config: missing required key \"grid\"");
  const json& grid_doc = doc.at("grid");
  allow_keys(grid_doc, "grid", {"dim", "n"});
  const auto dim = count(grid_doc, "dim", "grid", 1);
  const auto n = count(grid_doc, "n", "grid", 0);
  if (dim < 1 || dim > 2) throw ConfigError("grid.dim must be 1 or 2");
  if (n < 2 || n > 4096) throw ConfigError("grid.n must lie in [2, 4096]");
  const TorusGrid grid(static_cast<int>(dim), static_cast<int>(n));

  const json model = doc.value("model", json::object());
  allow_keys(model, "model", {"lagrangian", "g", "coupling"});
  LagrangianModel lagrangian =
      model.contains("lagrangian") ? parse_lagrangian(model.at("lagrangian"), grid, "model.lagrangian")
                                   : quadratic_lagrangian(grid.dim());
  const Potential potential =
      model.contains("g") ? parse_potential(model.at("g"), grid, "model.g") : sin2pi_potential();
  CouplingModel coupling = parse_coupling(model.value("coupling", json::object()), potential, "model.coupling");

  ProblemSpec spec{std::move(lagrangian), std::move(coupling), grid, number(doc, "tau", "config"),
                   number(doc, "lambda", "config")};
  const json window = doc.value("window", json::object());
  allow_keys(window, "window", {"radius_steps"});
  spec.window_radius = static_cast<int>(count(window, "radius_steps", "window", 0));

  const json solver = doc.value("solver", json::object());
  allow_keys(solver, "solver",
             {"value_tol", "ergodic_tol", "max_iters", "fixed_point_tol", "damping", "max_outer", "burn_in", "samples"});
  auto& t = spec.tolerances;
  t.value_tol = number(solver, "value_tol", "solver", t.value_tol);
  t.ergodic_tol = number(solver, "ergodic_tol", "solver", t.ergodic_tol);
  t.max_iters = count(solver, "max_iters", "solver", t.max_iters);
  t.fixed_point_tol = number(solver, "fixed_point_tol", "solver", t.fixed_point_tol);
  t.damping = number(solver, "damping", "solver", t.damping);
  t.max_outer = count(solver, "max_outer", "solver", t.max_outer);
  spec.orbit.burn_in = count(solver, "burn_in", "solver", 0);
  spec.orbit.samples = count(solver, "samples", "solver", spec.orbit.samples);

  if (doc.contains("seeds")) {
    if (!doc.at("seeds").is_array()) throw ConfigError("seeds: expected an array of points");
    for (const auto& s : doc.at("seeds")) spec.seeds.push_back(point(s, grid.dim(), "seeds"));
  }
  spec.rng_seed = count(doc, "rng_seed", "config", 0);
  try {
    spec.validate();
  } catch (const InvalidSpecError& e) {
    throw ConfigError(e.what());
  }

  GridMeasure m_init = parse_m_init(doc.value("m_init", json::object()), grid, spec.rng_seed);
  RunConfig config{std::move(spec), std::move(m_init)};

  const json hjb = doc.value("hjb", json::object());
  allow_keys(hjb, "hjb", {"mode"});
  config.hjb_mode = text(hjb, "mode", "hjb", config.spec.ergodic() ? "ergodic" : "discounted");
  if (config.hjb_mode != "discounted" && config.hjb_mode != "ergodic")
    throw ConfigError("hjb.mode must be \"discounted\" or \"ergodic\"");
  if (config.hjb_mode == "discounted" && config.spec.ergodic())
    throw ConfigError("hjb.mode \"discounted\" needs lambda > 0");

  const json sweep = doc.value("sweep", json::object());
  allow_keys(sweep, "sweep", {"lambdas", "taus", "mode"});
  if (sweep.contains("lambdas")) config.lambdas = numbers(sweep.at("lambdas"), "sweep.lambdas");
  if (sweep.contains("taus")) config.taus = numbers(sweep.at("taus"), "sweep.taus");
  config.sweep_mode = text(sweep, "mode", "sweep", "discrete");
  if (config.sweep_mode != "discrete" && config.sweep_mode != "continuum")
    throw ConfigError("sweep.mode must be \"discrete\" or \"continuum\"");
  for (double l : config.lambdas) validate_with(config.spec, config.spec.tau, l);
  for (double tau : config.taus) validate_with(config.spec, tau, config.spec.lambda);

  const json nonuniq = doc.value("nonuniq", json::object());
  allow_keys(nonuniq, "nonuniq", {"seed_a", "seed_b"});
  if (nonuniq.contains("seed_a")) config.seed_a = point(nonuniq.at("seed_a"), grid.dim(), "nonuniq.seed_a");
  if (nonuniq.contains("seed_b")) config.seed_b = point(nonuniq.at("seed_b"), grid.dim(), "nonuniq.seed_b");

  if (doc.contains("record_timing")) {
    if (!doc.at("record_timing").is_boolean()) throw ConfigError("record_timing: expected a boolean");
    config.record_timing = doc.at("record_timing").get<bool>();
  }
  config.text = input;
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

int cmd_hjb(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  prepare(out, config);
  ProblemSpec spec = config.spec;
  if (config.hjb_mode == "ergodic") spec.lambda = 0.0;
  try {
    const ValueSolution sol =
        spec.ergodic() ? solve_ergodic(spec, config.m_init) : solve_discounted(spec, config.m_init);
    const Regime regime = spec.ergodic() ? Regime{Ergodic{sol.report.lbar}} : Regime{Discounted{spec.lambda}};
    const HjbResidual res = hjb_residual(sol.u, config.m_init, spec, sol.window, regime);
    write_text(out / "u.csv", grid_function_csv(sol.u));
    write_json(out / "report.json", value_report(sol, res, config.hjb_mode));
    log << "hjb: " << sol.report.iterations << " iterations, residual " << format_double(sol.report.final_residual)
        << ", W = " << sol.report.window_radius << "\n";
    return kOk;
  } catch (const DivergenceError& e) {
    return divergence(e, out, log);
  }
}

int cmd_dmfg(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  prepare(out, config);
  try {
    const MfgSolution sol =
        config.spec.ergodic() ? solve_ergodic_mfg(config.spec, config.m_init) : solve_dmfg(config.spec, config.m_init);
    write_solution(out, sol);
    log << "dmfg: " << sol.outer_iterations << " outer iterations, coupling gap "
        << format_double(sol.residuals.coupling_gap) << (sol.converged ? "" : " (not converged)") << "\n";
    return sol.converged ? kOk : kNotConverged;
  } catch (const DivergenceError& e) {
    return divergence(e, out, log);
  }
}

namespace {

int write_sweep(const SweepTable& table, const std::filesystem::path& out, std::ostream& log) {
  write_text(out / "sweep.csv", sweep_csv(table));
  write_json(out / "sweep.json", to_json(table));
  std::size_t flagged = 0;
  for (const auto& r : table.rows) flagged += r.error.empty() && r.converged ? 0 : 1;
  log << table.kind << ": " << table.rows.size() << " rows, " << flagged << " flagged\n";
  return kOk;
}

}  // namespace

int cmd_sweep_lambda(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  if (config.lambdas.empty()) throw ConfigError("sweep-lambda needs sweep.lambdas");
  prepare(out, config);
  const SweepOptions options{config.m_init, config.record_timing, true};
  const SweepTable table = config.sweep_mode == "continuum"
                               ? sweep_lambda_continuum(config.spec, config.lambdas, options)
                               : sweep_lambda_discrete(config.spec, config.lambdas, options);
  return write_sweep(table, out, log);
}

int cmd_sweep_tau(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  if (config.taus.empty()) throw ConfigError("sweep-tau needs sweep.taus");
  if (config.spec.ergodic()) throw ConfigError("sweep-tau needs lambda > 0");
  prepare(out, config);
  const SweepOptions options{config.m_init, config.record_timing, false};
  return write_sweep(sweep_tau(config.spec, config.taus, options), out, log);
}

int cmd_nonuniq(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  if (!config.seed_a || !config.seed_b) throw ConfigError("nonuniq needs nonuniq.seed_a and nonuniq.seed_b");
  if (config.spec.ergodic()) throw ConfigError("nonuniq needs lambda > 0");
  prepare(out, config);
  try {
    const NonuniquenessResult r = demonstrate_nonuniqueness(config.spec, *config.seed_a, *config.seed_b);
    write_solution(out / "a", r.a);
    write_solution(out / "b", r.b);
    write_json(out / "report.json", {{"version", std::string(version_string())},
                                     {"separation", r.separation},
                                     {"threshold", r.threshold},
                                     {"tied_minimizers", r.tied_minimizers},
                                     {"converged_a", r.a.converged},
                                     {"converged_b", r.b.converged},
                                     {"success", r.success}});
    log << "nonuniq: separation " << format_double(r.separation) << ", threshold " << format_double(r.threshold)
        << "\n";
    if (!r.a.converged || !r.b.converged) return kNotConverged;
    return r.success ? kOk : kCriterionNotMet;
  } catch (const DivergenceError& e) {
    return divergence(e, out, log);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Weak KAM solver for discounted mean field games on the torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string()));

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool quiet = false;
  using Command = int (*)(const RunConfig&, const std::filesystem::path&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"hjb", "Solve the discounted or ergodic discrete HJ equation", cmd_hjb},
      {"dmfg", "Solve the discrete mean field game by damped iteration", cmd_dmfg},
      {"sweep-lambda", "Vanishing discount sweep", cmd_sweep_lambda},
      {"sweep-tau", "Time step sweep at fixed lambda", cmd_sweep_tau},
      {"nonuniq", "Two-branch non-uniqueness demonstration", cmd_nonuniq},
  };
  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config (schema 1)")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--threads", threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", quiet, "Suppress progress output");
    sub->callback([&selected, f = fn] { selected = f; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  set_max_threads(threads);
  std::ostringstream sink;
  std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : std::cout;
  try {
    const RunConfig config = load_config(config_path);
    return selected(config, out_dir, log);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidSpecError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

}  // namespace wkam::cli
