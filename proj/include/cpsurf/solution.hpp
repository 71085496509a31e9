#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpsurf/expr.hpp"

namespace cpsurf {

/// A candidate field f = (f_1, ..., f_N) given as N component expressions.
/// Builtins are materialized into expressions so every transformation acts on
/// one representation.
struct SolutionSpec {
  int n = 0;
  std::vector<ExprPtr> components;
  Bindings parameters;
  std::string builtin;  // empty for user expressions
};

/// Order-3 jets of every component at one point.
struct FieldJet {
  Point point;
  std::vector<Jet2> components;

  int n() const { return static_cast<int>(components.size()); }

  /// d_L^a d_R^b f as a vector.
  Eigen::VectorXcd partial(int a, int b) const;
  Eigen::VectorXcd value() const { return partial(0, 0); }

  /// The field as an N x 1 matrix jet.
  MatJet column() const;
};

/// Throws InvalidSpec unless n >= 2 and components.size() == n.
void validate(const SolutionSpec& spec);

/// Parses component strings; identifiers must be keys of `parameters`.
SolutionSpec make_expression_spec(const std::vector<std::string>& components, Bindings parameters = {});

/// Builtin ids: cp1_example, constant, left_mover, right_mover, s2_kink, torus.
/// `components` overrides the default expressions of constant/left_mover/right_mover.
SolutionSpec make_builtin(const std::string& id, Bindings parameters = {},
                          const std::vector<std::string>& components = {});

std::vector<std::string> builtin_catalog();

/// Throws EvaluationDomainError when the field vanishes or an expression
/// leaves its domain.
FieldJet eval_field(const SolutionSpec& spec, const Point& at);

/// Component values only (no jets).
Eigen::VectorXcd eval_field_value(const SolutionSpec& spec, const Point& at);

/// xi_L <-> xi_R.
SolutionSpec swap_light_cone(const SolutionSpec& spec);

/// xi_L -> alpha(xi_L), xi_R -> beta(xi_R); null leaves a variable untouched.
SolutionSpec reparametrize(const SolutionSpec& spec, const ExprPtr& alpha, const ExprPtr& beta);

}  // namespace cpsurf
