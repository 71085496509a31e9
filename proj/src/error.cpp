#include "cpsurf/error.hpp"

#include <cstdio>

namespace cpsurf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZeroValue: return "DivisionByZeroValue";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EvaluationDomainError: return "EvaluationDomainError";
    case ErrorKind::UnboundParameter: return "UnboundParameter";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::SingularPathPoint: return "SingularPathPoint";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::DegeneratePoint: return "DegeneratePoint";
    case ErrorKind::ZeroJL: return "ZeroJL";
    case ErrorKind::GramSchmidtRankDeficiency: return "GramSchmidtRankDeficiency";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::VanishingCommutator: return "VanishingCommutator";
    case ErrorKind::SingularGridPoint: return "SingularGridPoint";
    case ErrorKind::OddPanelCount: return "OddPanelCount";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

std::string describe_parse(std::size_t offset, const std::vector<std::string>& expected,
                           const std::string& what) {
  std::string msg = what + " at offset " + std::to_string(offset);
  if (!expected.empty()) {
    msg += ", expected ";
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (k) msg += " | ";
      msg += "'" + expected[k] + "'";
    }
  }
  return msg;
}

std::string describe_path(int gl, int gr, double xl, double xr, double det_g) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "metric degenerates at grid index (%d, %d), point (%.6g, %.6g), detG=%.3e",
                gl, gr, xl, xr, det_g);
  return buf;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
    : Error(ErrorKind::ParseError, describe_parse(offset, expected, what)),
      offset_(offset),
      expected_(std::move(expected)) {}

SingularPathError::SingularPathError(int grid_l, int grid_r, double xi_l, double xi_r, double det_g)
    : Error(ErrorKind::SingularPathPoint, describe_path(grid_l, grid_r, xi_l, xi_r, det_g)),
      grid_l_(grid_l),
      grid_r_(grid_r),
      xi_l_(xi_l),
      xi_r_(xi_r) {}

}  // namespace cpsurf
