#pragma once

// Config ingestion, report emission and the five commands. Exit codes:
// 0 ok, 2 config/IO, 3 domain or degenerate point, 4 tolerance failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpsurf/grid.hpp"

namespace cpsurf::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kDomainError = 3, kToleranceFailure = 4 };

struct Tolerances {
  double det_g = 1e-9;       // relative factor in detG_tol
  double residual = 1e-10;   // check
  double quadrature = 1e-9;  // immerse
  double willmore = 1e-6;    // relative change between the last two refinements
};

struct RunConfig {
  SolutionSpec spec;
  std::string solution_label;
  Grid grid;
  Point base;
  Tolerances tol;
  std::vector<std::string> projection;  // three basis labels, N > 2 only
  std::optional<Point> point;
  std::string out_dir = ".";
};

/// Throws Error(ConfigError) with a message naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// "xiL,xiR" -> Point. Throws ConfigError.
Point parse_point(const std::string& text);

/// Fixed scientific, 17 significant digits.
std::string format_double(double v);

/// JSON text with every float in format_double form; non-finite floats become null.
std::string dump_json(const nlohmann::ordered_json& j);

/// Maps library errors to exit codes.
int exit_code_for(ErrorKind kind);

int cmd_check(const RunConfig& cfg, std::ostream& log);
int cmd_geometry(const RunConfig& cfg, std::ostream& log);
int cmd_immerse(const RunConfig& cfg, std::ostream& log);
int cmd_frame(const RunConfig& cfg, std::ostream& log);
int cmd_willmore(const RunConfig& cfg, std::ostream& log);

/// Dispatches by name and converts errors into exit codes, reporting them on `err`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace cpsurf::cli
