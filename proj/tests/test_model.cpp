#include <doctest.h>

#include "cpsurf/model.hpp"
#include "support.hpp"

using namespace cpsurf;
using fixtures::random_points;
using fixtures::random_unitary;

namespace {

FieldJet field_from_values(const std::vector<cplx>& v) {
  FieldJet f;
  for (const cplx& c : v) f.components.push_back(jet_constant(c));
  return f;
}

std::vector<SolutionSpec> test_specs() {
  return {make_builtin("cp1_example"), make_builtin("constant"), make_builtin("left_mover"),
          make_builtin("right_mover"), make_builtin("s2_kink"), make_builtin("torus"),
          fixtures::rotated_cp1_in_cp2(), make_expression_spec({"1", "xiL*xiR"})};
}

}  // namespace

TEST_CASE("projector examples") {
  Eigen::Matrix2cd e1;
  e1 << 0, 0, 0, 1;
  CHECK((projector(field_from_values({1.0, 0.0})).value() - e1).norm() < 1e-15);
  Eigen::Matrix2cd e2;
  e2 << 0.5, -0.5, -0.5, 0.5;
  CHECK((projector(field_from_values({1.0, 1.0})).value() - e2).norm() < 1e-15);
  CHECK_THROWS_AS(projector(field_from_values({0.0, 0.0})), Error);
}

TEST_CASE("projector invariants on every test spec") {
  for (const SolutionSpec& s : test_specs()) {
    for (const Point& q : random_points(10, -1.0, 1.0, -1.0, 1.0, 21)) {
      const FieldJet f = eval_field(s, q);
      const Eigen::MatrixXcd p = projector(f).value();
      CHECK((p * p - p).norm() < 1e-12);
      CHECK((p.adjoint() - p).norm() < 1e-12);
      CHECK(std::abs(p.trace() - double(s.n - 1)) < 1e-12);
      CHECK((p * f.value()).norm() < 1e-12 * f.value().norm());
    }
  }
}

TEST_CASE("Euler-Lagrange residuals vanish on solutions") {
  const auto pts = random_points(20, -2.0, 2.0, -2.0, 2.0, 22, 0.05);
  for (const SolutionSpec& s : {make_builtin("cp1_example"), make_builtin("constant"), make_builtin("left_mover"),
                                make_builtin("right_mover"), make_builtin("s2_kink"), make_builtin("torus"),
                                fixtures::rotated_cp1_in_cp2()}) {
    INFO(s.builtin);
    for (const Point& q : pts) {
      const FieldJet f = eval_field(s, q);
      CHECK(el_residual(f).norm() < 1e-10);
      const MatrixResidual m = el_residual_matrix(f);
      CHECK(m.commutator.norm() < 1e-10);
      CHECK(m.conservation.norm() < 1e-10);
      CHECK(current_conservation_residual(f) < 1e-10);
    }
  }
}

TEST_CASE("vector and matrix residuals agree on a non-solution") {
  const SolutionSpec s = make_expression_spec({"1", "xiL*xiR"});
  const FieldJet f = eval_field(s, {0.5, 0.5});
  CHECK(el_residual_norm(f) > 1e-2);
  CHECK(el_residual_matrix(f).commutator.norm() > 1e-2);
  CHECK(current_conservation_residual(f) > 1e-2);
}

TEST_CASE("currents") {
  const FieldJet c = eval_field(make_builtin("constant"), {0.3, 0.1});
  const Currents jc = currents(c);
  CHECK(std::abs(jc.left.value()) == 0.0);
  CHECK(std::abs(jc.right.value()) == 0.0);

  const FieldJet lm = eval_field(make_builtin("left_mover"), {0.3, 0.1});
  const Currents jl = currents(lm);
  CHECK(std::abs(jl.right.value()) == 0.0);
  CHECK(jl.left.value().real() > 0.0);

  // P-weighted current of cp1_example from values
  const FieldJet f = eval_field(make_builtin("cp1_example"), {1.2, -0.4});
  const Eigen::VectorXcd v = f.value(), dl = f.partial(1, 0);
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(2, 2) - v * v.adjoint() / v.squaredNorm();
  const double jl_direct = (dl.adjoint() * p * dl)(0, 0).real() / v.squaredNorm();
  CHECK(std::abs(currents(f).left.value().real() - jl_direct) < 1e-14);
  CHECK(std::abs(currents(f).left.value().imag()) < 1e-15);
}

TEST_CASE("action density") {
  CHECK(action_density(eval_field(make_builtin("constant"), {0.0, 0.0})) == 0.0);
  CHECK(action_density(eval_field(make_expression_spec({"1", "xiL"}), {0.0, 0.0})) == 0.0);

  const FieldJet f = eval_field(make_builtin("cp1_example"), {0.7, -1.1});
  const Eigen::VectorXcd v = f.value(), dl = f.partial(1, 0), dr = f.partial(0, 1);
  const double n2 = v.squaredNorm();
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(2, 2) - v * v.adjoint() / n2;
  const cplx direct = (dl.dot(p * dr) + dr.dot(p * dl)) / (4.0 * n2);
  CHECK(std::abs(direct.imag()) < 1e-15);
  CHECK(std::abs(action_density(f) - direct.real()) < 1e-14);
}

TEST_CASE("gauge transformation leaves P and the currents alone") {
  const SolutionSpec s = make_builtin("cp1_example");
  const SolutionSpec trivial = apply_gauge(s, make_constant(0.0), make_constant(0.0));
  const Point q0{1.5, -0.5};
  CHECK((eval_field_value(trivial, q0) - eval_field_value(s, q0)).norm() < 1e-15);

  const SolutionSpec g = apply_gauge(s, parse_expr("xiL*xiR + sin(xiL)"), parse_expr("0.3*xiR - 0.1*xiL^2"));
  for (const Point& q : random_points(20, -2.0, 2.0, -2.0, 2.0, 23, 0.1)) {
    const FieldJet a = eval_field(s, q), b = eval_field(g, q);
    CHECK((projector(a).value() - projector(b).value()).norm() < 1e-12);
    const Currents ca = currents(a), cb = currents(b);
    CHECK(std::abs(ca.left.value() - cb.left.value()) < 1e-10);
    CHECK(std::abs(ca.right.value() - cb.right.value()) < 1e-10);
  }
}

TEST_CASE("global unitary conjugates P and preserves the currents") {
  const SolutionSpec s = make_builtin("torus");
  CHECK((eval_field_value(apply_global(s, Eigen::MatrixXcd::Identity(3, 3)), {0.2, 0.4}) -
         eval_field_value(s, {0.2, 0.4}))
            .norm() < 1e-15);
  const Eigen::MatrixXcd phi = random_unitary(3, 5);
  const SolutionSpec t = apply_global(s, phi);
  for (const Point& q : random_points(20, -1.0, 1.0, -1.0, 1.0, 24)) {
    const FieldJet a = eval_field(s, q), b = eval_field(t, q);
    CHECK((phi * projector(a).value() * phi.adjoint() - projector(b).value()).norm() < 1e-12);
    CHECK(std::abs(currents(a).left.value() - currents(b).left.value()) < 1e-10);
    CHECK(std::abs(currents(a).right.value() - currents(b).right.value()) < 1e-10);
  }
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(3, 3);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(apply_global(s, bad), Error);
}

TEST_CASE("parity swaps the currents and keeps solutions") {
  const SolutionSpec s = make_builtin("cp1_example");
  const SolutionSpec sw = swap_light_cone(s);
  for (const Point& q : random_points(20, -2.0, 2.0, -2.0, 2.0, 25, 0.1)) {
    const FieldJet a = eval_field(s, q), b = eval_field(sw, {q.xi_r, q.xi_l});
    CHECK(std::abs(currents(a).left.value() - currents(b).right.value()) < 1e-12);
    CHECK(std::abs(currents(a).right.value() - currents(b).left.value()) < 1e-12);
    CHECK(el_residual_norm(b) < 1e-10);
  }
}

TEST_CASE("conformal reparametrization scales J_L by the squared derivative") {
  const SolutionSpec s = make_builtin("cp1_example");
  const SolutionSpec re = reparametrize(s, parse_expr("sinh(xiL)"), nullptr);
  for (const Point& q : random_points(20, 0.0, 1.5, -2.0, -0.2, 26)) {
    const FieldJet a = eval_field(s, {std::sinh(q.xi_l), q.xi_r}), b = eval_field(re, q);
    const double scale = std::cosh(q.xi_l) * std::cosh(q.xi_l);
    CHECK(std::abs(currents(b).left.value().real() - scale * currents(a).left.value().real()) < 1e-10);
    CHECK(std::abs(currents(b).right.value().real() - currents(a).right.value().real()) < 1e-12);
    CHECK(el_residual_norm(b) < 1e-10);
  }
}
