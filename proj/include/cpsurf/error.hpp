#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpsurf {

enum class ErrorKind {
  DivisionByZeroValue,
  DomainError,
  ParseError,
  EvaluationDomainError,
  UnboundParameter,
  InvalidSpec,
  ZeroField,
  NotUnitary,
  ZeroVector,
  SingularPathPoint,
  QuadratureNonConvergence,
  DegeneratePoint,
  ZeroJL,
  GramSchmidtRankDeficiency,
  LinearSolveFailure,
  VanishingCommutator,
  SingularGridPoint,
  OddPanelCount,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the expression parser. `offset` is the 1-based byte position of
/// the offending token; end of input reports length + 1.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// A grid or path point where the metric degenerates during integration.
class SingularPathError : public Error {
 public:
  SingularPathError(int grid_l, int grid_r, double xi_l, double xi_r, double det_g);

  int grid_l() const noexcept { return grid_l_; }
  int grid_r() const noexcept { return grid_r_; }
  double xi_l() const noexcept { return xi_l_; }
  double xi_r() const noexcept { return xi_r_; }

 private:
  int grid_l_, grid_r_;
  double xi_l_, xi_r_;
};

}  // namespace cpsurf
