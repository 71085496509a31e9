#include "cpsurf/model.hpp"

#include <cmath>

namespace cpsurf {

namespace {

double field_norm2(const FieldJet& f) {
  const double n2 = f.value().squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  return n2;
}

bool is_zero_constant(const ExprPtr& e) {
  return e && e->kind == NodeKind::Constant && e->value == cplx(0.0);
}

}  // namespace

MatJet projector(const FieldJet& f) {
  field_norm2(f);
  const MatJet col = f.column();
  const MatJet row = adjoint(col);
  const Jet2 norm2 = trace(row * col);
  return identity_jet(f.n()) - jet_reciprocal(norm2) * (col * row);
}

Eigen::VectorXcd el_residual(const FieldJet& f) {
  const double n2 = field_norm2(f);
  const Eigen::VectorXcd v = f.value();
  const Eigen::VectorXcd dl = f.partial(1, 0), dr = f.partial(0, 1), dlr = f.partial(1, 1);
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;
  const Eigen::VectorXcd inner = dlr - (v.dot(dr) * dl + v.dot(dl) * dr) / n2;
  return p * inner;
}

double el_residual_norm(const FieldJet& f) {
  return el_residual(f).norm() / (1.0 + f.partial(1, 1).norm());
}

MatrixResidual el_residual_matrix(const FieldJet& f) {
  const MatJet p = projector(f);
  const MatJet pl = derivative(p, Dir::L), pr = derivative(p, Dir::R);
  const MatJet plr = derivative(pl, Dir::R);
  MatrixResidual out;
  out.commutator = commutator(plr, p).value();
  const MatJet ml = commutator(pl, p), mr = commutator(pr, p);
  out.conservation = derivative(mr, Dir::L).value() + derivative(ml, Dir::R).value();
  return out;
}

Currents currents(const FieldJet& f) {
  field_norm2(f);
  const MatJet p = projector(f);
  const MatJet col = f.column();
  const Jet2 inv = jet_reciprocal(trace(adjoint(col) * col));
  auto current = [&](Dir d) {
    const MatJet df = derivative(col, d);
    return jet_real(trace(adjoint(df) * p * df) * inv);
  };
  return {current(Dir::L), current(Dir::R)};
}

double current_conservation_residual(const FieldJet& f) {
  const Currents j = currents(f);
  return std::max(std::abs(derivative(j.right, Dir::L).value()),
                  std::abs(derivative(j.left, Dir::R).value()));
}

double action_density(const FieldJet& f) {
  const double n2 = field_norm2(f);
  const Eigen::VectorXcd v = f.value();
  const Eigen::VectorXcd dl = f.partial(1, 0), dr = f.partial(0, 1);
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;
  const cplx s = dl.dot(p * dr) + dr.dot(p * dl);
  return s.real() / (4.0 * n2);
}

SolutionSpec apply_gauge(const SolutionSpec& spec, const ExprPtr& alpha, const ExprPtr& beta) {
  validate(spec);
  if ((!alpha || is_zero_constant(alpha)) && (!beta || is_zero_constant(beta))) return spec;
  ExprPtr exponent;
  if (alpha) exponent = make_binary(BinaryOp::Mul, make_imag_unit(), alpha);
  if (beta) exponent = exponent ? make_binary(BinaryOp::Add, exponent, beta) : beta;
  const ExprPtr factor = make_function(ElementaryFn::Exp, exponent);
  SolutionSpec out = spec;
  for (auto& c : out.components) c = make_binary(BinaryOp::Mul, factor, c);
  out.builtin.clear();
  return out;
}

SolutionSpec apply_global(const SolutionSpec& spec, const Eigen::MatrixXcd& phi) {
  validate(spec);
  if (phi.rows() != spec.n || phi.cols() != spec.n) {
    throw Error(ErrorKind::NotUnitary, "matrix size differs from N");
  }
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(spec.n, spec.n);
  if ((phi.adjoint() * phi - eye).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::NotUnitary, "Phi^dagger Phi != 1");
  }
  if (phi == eye) return spec;
  SolutionSpec out = spec;
  for (int r = 0; r < spec.n; ++r) {
    ExprPtr sum;
    for (int c = 0; c < spec.n; ++c) {
      if (phi(r, c) == cplx(0.0)) continue;
      ExprPtr term = phi(r, c) == cplx(1.0)
                         ? spec.components[c]
                         : make_binary(BinaryOp::Mul, make_constant(phi(r, c)), spec.components[c]);
      sum = sum ? make_binary(BinaryOp::Add, sum, term) : term;
    }
    out.components[r] = sum ? sum : make_constant(0.0);
  }
  out.builtin.clear();
  return out;
}

}  // namespace cpsurf
