#pragma once

// Moving frame tau = (d_L X, d_R X, n_3, ..., n_{N^2-1}) built through the
// SU(N) cascade Phi with Phi^dag f = (|f|, 0, ..., 0), the Gauss-Weingarten
// coefficients U, V, and the curvature quantities derived from them.

#include <string>
#include <vector>

#include "cpsurf/immersion.hpp"

namespace cpsurf {

/// Phi with Phi^dag f0 = (|f0|, 0, ..., 0). Throws ZeroVector.
Eigen::MatrixXcd build_phi(const Eigen::VectorXcd& f0);

/// The same cascade evaluated on field jets.
MatJet build_phi_jet(const std::vector<Jet2>& f);

struct Frame {
  Point point;
  SuElement d_left, d_right;
  std::vector<SuElement> normals;
  std::vector<std::string> labels;  // "A13~" for Gram-Schmidt output, "A23", "C1" otherwise
  int gram_schmidt_count = 0;       // the first normals come from Gram-Schmidt
  Eigen::MatrixXcd phi;

  // Jets used for derivatives along the frame.
  MatJet x_left, x_right;
  std::vector<MatJet> normal_jets;

  int dim() const { return static_cast<int>(normals.size()) + 2; }
  /// tau_0 = d_L X, tau_1 = d_R X, tau_{k+2} = normals[k].
  const SuElement& tau(int r) const { return r == 0 ? d_left : r == 1 ? d_right : normals[r - 2]; }
};

/// Throws DegeneratePoint, GramSchmidtRankDeficiency.
Frame build_frame(const FieldJet& f);

/// Gram matrix of tau minus diag(G, I), with G from the field formula.
Eigen::MatrixXd normalization_table(const FieldJet& f, const Frame& frame);

struct GWData {
  Eigen::Matrix2d a_left;   // row (A^L_L, A^L_R)
  Eigen::Matrix2d a_right;  // row (A^R_L, A^R_R)
  Eigen::VectorXd q_left, q_right, h_tilde;
  Eigen::VectorXd alpha_left, beta_left, alpha_right, beta_right;
  Eigen::MatrixXd s_left, s_right;  // antisymmetrized
  double s_defect = 0.0;            // max |s + s^T| before antisymmetrization
  Eigen::MatrixXd u, v;
  MetricSample metric;
};

/// Throws DegeneratePoint, LinearSolveFailure.
GWData gw_coefficients(const FieldJet& f, const Frame& frame);

/// A^L_L, A^L_R (row 0) and A^R_L, A^R_R (row 1) from the closed-form expressions in f.
Eigen::Matrix2d a_coefficients_closed_form(const FieldJet& f);

/// max over rows of || d_D tau_r - (U or V) tau ||_F.
struct Reconstruction {
  double left = 0.0;
  double right = 0.0;
};

Reconstruction gw_reconstruction_residual(const Frame& frame, const GWData& gw);

/// || d_R U - d_L V + [U, V] ||_F with central differences of step h.
double gauss_codazzi_residual(const SolutionSpec& spec, const Point& at, double h);

/// Second derivatives from the closed-form expressions in f (d_L d_R X
/// assumes f solves the field equations).
struct SecondDerivatives {
  SuElement ll, lr, rr;
};

SecondDerivatives second_derivatives_closed_form(const FieldJet& f);

/// Coefficients of dxi_L^2, dxi_L dxi_R / 2, dxi_R^2: the normal parts of the
/// second derivatives.
struct SecondFundamentalForm {
  SuElement ll, lr, rr;
};

SecondFundamentalForm second_fundamental_form(const FieldJet& f, const Frame& frame);

struct MeanCurvature {
  SuElement vector;
  double norm = 0.0;    // sqrt((H, H))
  double scalar = 0.0;  // (H, n) / (n, n) for N = 2, else 0
};

/// H = (J_R II_LL - 2 G_LR II_LR + J_L II_RR) / (2 detG).
MeanCurvature mean_curvature(const FieldJet& f, const Frame& frame);

/// N = 2 closed forms with c = d_R f^dag P d_L f.
struct Cp1Shortcuts {
  SuElement ii_mixed;          // coefficient of dxi_L dxi_R: -2 (c - conj c)(1 - 2P) / |f|^2
  SuElement ii_mixed_literal;  // same without the 1 / |f|^2
  SuElement h_corrected;       // 2 (c + conj c) / (c - conj c) (1 - 2P)
  SuElement h_literal;         // denominator c - d_R f^dag P d_R f as printed
  SuElement normal;            // i (1 - 2P)
};

Cp1Shortcuts cp1_shortcuts(const FieldJet& f);

struct AltNormals {
  SuElement n_p;
  SuElement n_comm;
};

/// n_P = i sqrt2 (sqrt((N-1)/N) 1 - sqrt(N/(N-1)) P), n_comm = [X_L, X_R] / |[X_L, X_R]|.
/// Throws VanishingCommutator.
AltNormals alt_normals(const FieldJet& f);

/// Components of the second derivatives outside the normal sets they should
/// lie in: ll, rr outside the Gram-Schmidt normals, lr outside the rest.
struct SpanResiduals {
  double ll = 0.0, rr = 0.0, lr = 0.0;
};

SpanResiduals span_residuals(const FieldJet& f, const Frame& frame);

/// Composite Simpson of |H|^2 sqrt(detG) with even panel counts.
/// Throws SingularGridPoint, OddPanelCount.
struct WillmoreResult {
  double value = 0.0;
  int panels_l = 0, panels_r = 0;
};

WillmoreResult willmore(const SolutionSpec& spec, double l_min, double l_max, double r_min, double r_max,
                        int panels_l, int panels_r, Execution exec = Execution::Parallel);

}  // namespace cpsurf
