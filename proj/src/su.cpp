#include "cpsurf/su.hpp"

#include <cmath>

namespace cpsurf {

double su_inner(const SuElement& a, const SuElement& b) {
  return -0.5 * (a.transpose().cwiseProduct(b)).sum().real();
}

double su_norm(const SuElement& a) { return std::sqrt(std::max(0.0, su_inner(a, a))); }

bool is_su(const SuElement& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m + m.adjoint()).cwiseAbs().maxCoeff() <= tol && std::abs(m.trace()) <= tol;
}

std::string BasisElement::label() const {
  if (family == 'C') return "C" + std::to_string(j);
  return std::string(1, family) + std::to_string(j) + std::to_string(k);
}

SuElement basis_a(int n, int j, int k) {
  SuElement m = SuElement::Zero(n, n);
  m(j - 1, k - 1) = cplx(0.0, 1.0);
  m(k - 1, j - 1) = cplx(0.0, 1.0);
  return m;
}

SuElement basis_b(int n, int j, int k) {
  SuElement m = SuElement::Zero(n, n);
  m(j - 1, k - 1) = 1.0;
  m(k - 1, j - 1) = -1.0;
  return m;
}

SuElement basis_c(int n, int p) {
  SuElement m = SuElement::Zero(n, n);
  const double s = std::sqrt(2.0 / (p * (p + 1.0)));
  for (int d = 0; d < p; ++d) m(d, d) = cplx(0.0, s);
  m(p, p) = cplx(0.0, -p * s);
  return m;
}

std::vector<BasisElement> su_basis(int n) {
  std::vector<BasisElement> out;
  out.reserve(n * n - 1);
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      out.push_back({'A', j, k, basis_a(n, j, k)});
      out.push_back({'B', j, k, basis_b(n, j, k)});
    }
  }
  for (int p = 1; p < n; ++p) out.push_back({'C', p, 0, basis_c(n, p)});
  return out;
}

Eigen::VectorXd su_coordinates(const SuElement& x, const std::vector<BasisElement>& basis) {
  Eigen::VectorXd out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) out[i] = su_inner(x, basis[i].matrix);
  return out;
}

SuElement su_from_coordinates(const Eigen::VectorXd& x, const std::vector<BasisElement>& basis) {
  const int n = static_cast<int>(basis.front().matrix.rows());
  SuElement out = SuElement::Zero(n, n);
  for (std::size_t i = 0; i < basis.size(); ++i) out += x[i] * basis[i].matrix;
  return out;
}

Eigen::MatrixXd su_gram(const std::vector<SuElement>& elems) {
  const int m = static_cast<int>(elems.size());
  Eigen::MatrixXd g(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) g(a, b) = g(b, a) = su_inner(elems[a], elems[b]);
  }
  return g;
}

}  // namespace cpsurf
