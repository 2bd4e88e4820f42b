#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omit/analysis.hpp"
#include "omit/errors.hpp"
#include "omit/io.hpp"

namespace omit::cli {

enum ExitCode : int { ok = 0, config_parse = 2, validation = 3, numerical = 4 };

using ConfigError = ParseError;

enum class MethodChoice { closed, solve, eliminated, both };

struct OutputRequest {
  std::string kind;  // profile_csv | features_json | roots_json | oracle_report_json
  std::filesystem::path path;
};

/// Everything a subcommand needs. Exactly one of `scenario` / `params` is set.
struct RunConfig {
  std::optional<std::string> scenario;
  std::optional<SystemParams> params;
  Grid grid;
  MethodChoice method = MethodChoice::solve;
  std::vector<OutputRequest> outputs;
  std::vector<double> phases;
  double prominence = 0.02;  // fraction of the profile span
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> out_dir;

  SystemParams resolved_params() const;
  std::string scenario_label() const;
  std::vector<Method> methods() const;
};

MethodChoice parse_method(std::string_view text);

/// Reads a config document. Throws ConfigError on malformed JSON or
/// wrong types, ValidationError on invariant violations.
RunConfig parse_config(const Json& doc);

/// Runs the command line; never throws. Errors are written to `err` as a
/// JSON record and mapped to the documented exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omit::cli
