#pragma once

// Sigma-model layer: projector, Euler-Lagrange residuals, currents, action
// density and the symmetry transformations used as invariance oracles.

#include "cpsurf/solution.hpp"

namespace cpsurf {

/// Jet of P = 1 - f f^dagger / |f|^2. Throws ZeroField.
MatJet projector(const FieldJet& f);

/// P { d_L d_R f - ((f^dag d_R f) d_L f + (f^dag d_L f) d_R f) / |f|^2 }.
Eigen::VectorXcd el_residual(const FieldJet& f);

/// ||el_residual|| / (1 + ||d_L d_R f||).
double el_residual_norm(const FieldJet& f);

struct MatrixResidual {
  Eigen::MatrixXcd commutator;    // [d_L d_R P, P]
  Eigen::MatrixXcd conservation;  // d_L [d_R P, P] + d_R [d_L P, P]
};

MatrixResidual el_residual_matrix(const FieldJet& f);

/// J_D = d_D f^dag P d_D f / |f|^2 as real-valued order-2 jets.
struct Currents {
  Jet2 left;
  Jet2 right;
};

Currents currents(const FieldJet& f);

/// max(|d_L J_R|, |d_R J_L|).
double current_conservation_residual(const FieldJet& f);

/// (1 / 4|f|^2) (d_L f^dag P d_R f + d_R f^dag P d_L f).
double action_density(const FieldJet& f);

/// f -> exp(i alpha + beta) f for real-valued alpha, beta.
SolutionSpec apply_gauge(const SolutionSpec& spec, const ExprPtr& alpha, const ExprPtr& beta);

/// f -> Phi f with Phi folded into constant coefficients. Throws NotUnitary.
SolutionSpec apply_global(const SolutionSpec& spec, const Eigen::MatrixXcd& phi);

}  // namespace cpsurf
