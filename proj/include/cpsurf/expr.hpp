#pragma once

// Expression DSL for field components.
//
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('-' | '+') unary | power
//   power := atom ('^' unary)?              right-associative
//   atom  := number | 'i' | 'xiL' | 'xiR' | name
//          | fn '(' expr ')' | '(' expr ')'
//   fn    := exp log sqrt sin cos tan sinh cosh tanh arctan conj
//
// Input is ASCII only.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "cpsurf/jet.hpp"

namespace cpsurf {

enum class NodeKind { Constant, VarL, VarR, Param, ImagUnit, Negate, Function, Conj, Binary };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  NodeKind kind = NodeKind::Constant;
  cplx value{};                      // Constant
  std::string name;                  // Param
  ElementaryFn fn = ElementaryFn::Exp;  // Function
  BinaryOp op = BinaryOp::Add;       // Binary
  ExprPtr lhs, rhs;                  // operands (Negate/Function/Conj use lhs)
};

using Bindings = std::map<std::string, double>;

struct Point {
  double xi_l = 0.0;
  double xi_r = 0.0;
};

// Node constructors.
ExprPtr make_constant(cplx v);
ExprPtr make_var(Dir dir);
ExprPtr make_param(std::string name);
ExprPtr make_imag_unit();
ExprPtr make_negate(ExprPtr x);
ExprPtr make_function(ElementaryFn fn, ExprPtr x);
ExprPtr make_conj(ExprPtr x);
ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b);

struct ParseOptions {
  /// When set, bare identifiers outside this set are rejected.
  const std::set<std::string>* parameters = nullptr;
};

/// Throws ParseError with a 1-based offset and the expected-token set.
ExprPtr parse_expr(std::string_view source, const ParseOptions& options = {});

/// Parseable text; constants print with 17 significant digits.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

bool depends_on(const Expr& e, Dir dir);
void collect_params(const Expr& e, std::set<std::string>& out);

/// Replaces xiL / xiR by the given expressions (null keeps the variable).
ExprPtr substitute(const ExprPtr& e, const ExprPtr& for_l, const ExprPtr& for_r);

/// Jet of the expression at `at`. Throws EvaluationDomainError / UnboundParameter.
Jet2 eval_jet(const Expr& e, const Point& at, const Bindings& params);

/// Direct complex evaluation without jets.
cplx eval_value(const Expr& e, const Point& at, const Bindings& params);

}  // namespace cpsurf
