#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "wkam/io.hpp"

namespace fs = std::filesystem;
using namespace wkam;

namespace {

const fs::path kData = WKAM_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wkam_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

int run(const std::string& command, const std::string& config, const fs::path& out) {
  const std::string line = std::string(WKAM_BINARY) + " " + command + " --config " + (kData / config).string() +
                           " --out " + out.string() + " --quiet > /dev/null 2>&1";
  const int status = std::system(line.c_str());
  return WEXITSTATUS(status);
}

std::string config_error(const std::string& text) {
  try {
    cli::parse_config(text);
  } catch (const cli::ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const auto c = cli::load_config(kData / "convolution.json");
  CHECK(c.spec.grid.n() == 64);
  CHECK(c.spec.coupling.depends_on_measure());
  CHECK(c.sweep_mode == "continuum");
  CHECK(c.lambdas.size() == 3);
  CHECK(c.seed_b.has_value());
  CHECK(c.text == slurp(kData / "convolution.json"));
  const auto again = cli::load_config(kData / "convolution.json");
  CHECK(again.m_init.weights() == c.m_init.weights());

  CHECK(config_error(slurp(kData / "unknown_key.json")).find("colour") != std::string::npos);
  CHECK(config_error(slurp(kData / "malformed.json")).find("line 4") != std::string::npos);
  CHECK(config_error(slurp(kData / "bad_tau_lambda.json")).find("tau * lambda") != std::string::npos);
  CHECK(config_error(R"({"schema": 2, "grid": {"n": 8}, "tau": 0.1, "lambda": 0.5})").find("schema") != std::string::npos);
  CHECK(config_error(R"({"schema": 1, "grid": {"n": 8}, "tau": "x", "lambda": 0.5})").find("tau") != std::string::npos);
  CHECK(config_error(R"({"schema": 1, "grid": {"n": 8}, "tau": 0.1, "lambda": 0.5, "model": {"g": {"kind": "bumpy"}}})")
            .find("bumpy") != std::string::npos);
  CHECK(config_error(R"({"schema": 1, "grid": {"n": 8}, "tau": 0.1, "lambda": 0.5, "solver": {"damping": 0}})")
            .find("damping") != std::string::npos);
  CHECK(config_error(R"({"schema": 1, "grid": {"n": 8}, "tau": 0.1, "lambda": 0.5, "sweep": {"lambdas": [0.5, 20]}})")
            .find("tau * lambda") != std::string::npos);
}

TEST_CASE("hjb subcommand") {
  const auto out = scratch("hjb");
  CHECK(run("hjb", "single_well.json", out) == 0);
  CHECK(fs::exists(out / "u.csv"));
  CHECK(slurp(out / "config_echo.json") == slurp(kData / "single_well.json"));
  const auto csv = slurp(out / "u.csv");
  CHECK(csv.rfind("x,u\n0,0\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["converged"] == true);
  CHECK(report["version"].get<std::string>().size() > 0);

  CHECK(run("hjb", "bad_tau_lambda.json", scratch("bad")) == 1);
  CHECK(run("hjb", "malformed.json", scratch("malformed")) == 1);
  CHECK(run("hjb", "unknown_key.json", scratch("unknown")) == 1);
  CHECK(run("hjb", "missing.json", scratch("missing")) == 1);
  const auto diverged = scratch("diverged");
  CHECK(run("hjb", "max_iters.json", diverged) == 2);
  const auto history = nlohmann::json::parse(slurp(diverged / "report.json"));
  CHECK(history["residual_history"].size() == 1);

  const auto erg = scratch("ergodic");
  CHECK(run("hjb", "ergodic_2d.json", erg) == 0);
  const auto er = nlohmann::json::parse(slurp(erg / "report.json"));
  CHECK(er["solve_report"]["lbar"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("dmfg subcommand writes the solution layout") {
  const auto out = scratch("dmfg");
  CHECK(run("dmfg", "convolution.json", out) == 0);
  for (const char* f : {"u.csv", "m.csv", "mu.json", "report.json", "config_echo.json"}) CHECK(fs::exists(out / f));
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["residuals"]["coupling_gap"].get<double>() <= 1e-5);
  const auto mu = nlohmann::json::parse(slurp(out / "mu.json"));
  CHECK(mu["weights"].size() == 64 * (2 * mu["window_radius"].get<std::size_t>() + 1));
}

TEST_CASE("nonuniq subcommand exit codes") {
  const auto two = scratch("nonuniq_two");
  CHECK(run("nonuniq", "twowell.json", two) == 0);
  const auto report = nlohmann::json::parse(slurp(two / "report.json"));
  CHECK(report["separation"].get<double>() == doctest::Approx(0.5).epsilon(2.0 / 128));
  CHECK(fs::exists(two / "a" / "m.csv"));
  CHECK(fs::exists(two / "b" / "m.csv"));

  const auto one = scratch("nonuniq_one");
  CHECK(run("nonuniq", "single_well.json", one) == 3);
  CHECK(fs::exists(one / "report.json"));
}

TEST_CASE("sweeps tolerate failing rows") {
  const auto out = scratch("sweep_fail");
  CHECK(run("sweep-tau", "divergent_row.json", out) == 0);
  const auto table = nlohmann::json::parse(slurp(out / "sweep.json"));
  CHECK(table["rows"][0]["error"] == "");
  CHECK(table["rows"][1]["error"] != "");
  CHECK(run("sweep-lambda", "twowell.json", scratch("no_lambdas")) == 1);
}

TEST_CASE("reruns reproduce byte-identical CSV") {
  for (const char* cmd : {"hjb", "dmfg", "sweep-lambda", "sweep-tau", "nonuniq"}) {
    const auto a = scratch(std::string("repro_a_") + cmd);
    const auto b = scratch(std::string("repro_b_") + cmd);
    const int ca = run(cmd, "convolution.json", a);
    const int cb = run(cmd, "convolution.json", b);
    CHECK(ca == cb);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      const auto twin = b / fs::relative(entry.path(), a);
      CHECK(slurp(entry.path()) == slurp(twin));
    }
  }
}

TEST_CASE("serialization helpers") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  const TorusGrid g(2, 2);
  const auto csv = grid_function_csv(GridFunction(g, 1.5));
  CHECK(csv == "x0,x1,u\n0,0,1.5\n0,0.5,1.5\n0.5,0,1.5\n0.5,0.5,1.5\n");
  const auto j = to_json(GridMeasure::uniform(g));
  CHECK(j["n"] == 2);
  CHECK(j["weights"].size() == 4);
  const VelocityWindow w(TorusGrid(1, 4), 1, 0.5);
  const auto mu = PhaseMeasure::from_atoms(w, {{1, w.zero_slot(), 1.0}});
  CHECK(phase_measure_csv(mu) == "x,v,weight\n0.25,0,1\n");
}

}
