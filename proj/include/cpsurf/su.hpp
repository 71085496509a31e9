#pragma once

// su(N) as Euclidean space R^{N^2-1} with (A, B) = -1/2 tr AB.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpsurf/jet.hpp"

namespace cpsurf {

using SuElement = Eigen::MatrixXcd;

double su_inner(const SuElement& a, const SuElement& b);
double su_norm(const SuElement& a);

/// Anti-Hermitian and traceless within `tol`.
bool is_su(const SuElement& m, double tol = 1e-10);

struct BasisElement {
  char family = 'A';  // 'A', 'B' or 'C'
  int j = 0;          // 1-based; for C this is p
  int k = 0;          // 1-based; unused for C
  SuElement matrix;

  std::string label() const;
};

/// Orthonormal basis ordered A_12, B_12, A_13, B_13, ..., A_{N-1,N}, B_{N-1,N}, C_1, ..., C_{N-1}.
std::vector<BasisElement> su_basis(int n);

SuElement basis_a(int n, int j, int k);
SuElement basis_b(int n, int j, int k);
SuElement basis_c(int n, int p);

/// x_i = (X, e_i) in su_basis order.
Eigen::VectorXd su_coordinates(const SuElement& x, const std::vector<BasisElement>& basis);
SuElement su_from_coordinates(const Eigen::VectorXd& x, const std::vector<BasisElement>& basis);

/// Gram matrix of (A, B) over a list.
Eigen::MatrixXd su_gram(const std::vector<SuElement>& elems);

}  // namespace cpsurf
