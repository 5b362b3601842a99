#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gramdyn::cli {

enum class Subcommand { simulate, learn, analyze, sweep, npl, explore };
enum class Format { csv, json };

std::string_view to_string(Subcommand s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Bad flags or parameter values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The matrix could not be read or failed validation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --help was given; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatrixSource {
  enum class Kind { none, constructor, file, inline_json };
  Kind kind = Kind::none;
  std::string text;       // "class:params" or a path
  nlohmann::json inline_doc;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::simulate;
  MatrixSource matrix;
  std::vector<double> start;
  std::size_t generations = 30;
  bool stochastic = false;
  double gamma = 0.001;
  std::uint64_t tokens = 1'000'000;
  std::size_t learners = 1;
  std::uint64_t seed = 0;
  double a = 0.1;
  std::string rho_grid = "0.05:3:0.05";
  std::size_t burn_in = 10'000;
  std::size_t trials = 1000;
  std::size_t n = 3;
  std::string preset = "determiner-headedness";
  bool ternary = false;
  Format format = Format::csv;
  std::optional<std::string> out;            // default: standard output
  std::optional<std::string> dump_learners;  // npl per-learner CSV
};

// Arguments without the program name. Throws UsageError or HelpRequested.
// `rerun <file>` loads the configuration echoed in an earlier output file.
RunConfig parse_args(const std::vector<std::string>& args);

// "start:stop:step", endpoints included within half a step.
std::vector<double> parse_grid(std::string_view text);

// Fully resolved configuration as echoed into outputs (no output paths).
nlohmann::json resolved_config(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& doc);

// Reads the echoed configuration from an output file's text: the leading
// "# {...}" line of a CSV or the "config" member of a JSON document.
RunConfig config_from_output(std::string_view text);

struct RunResult {
  int exit_code = kExitOk;
  std::string summary;
  std::vector<std::string> warnings;
};

// Writes the primary output to `out` and any side files named in the config.
// Throws UsageError or DataError.
RunResult run(const RunConfig& config, std::ostream& out);

// Entry point used by the executable; returns the exit status.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gramdyn::cli
