#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wkam/measures.hpp"
#include "wkam/problem.hpp"

namespace wkam::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNotConverged = 2, kCriterionNotMet = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ProblemSpec spec;
  GridMeasure m_init;
  std::string hjb_mode{};  // "discounted" or "ergodic"
  std::string sweep_mode{};  // "discrete" or "continuum"
  std::vector<double> lambdas{};
  std::vector<double> taus{};
  std::optional<Point> seed_a{};
  std::optional<Point> seed_b{};
  bool record_timing = false;
  std::string text{};  // the config document as read
};

/// Parses and validates a schema-1 config. Unknown keys, type errors and
/// malformed JSON (reported with line and column) throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

int cmd_hjb(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_dmfg(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep_lambda(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep_tau(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_nonuniq(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

int run(int argc, char** argv);

}  // namespace wkam::cli
