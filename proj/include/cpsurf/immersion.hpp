#pragma once

// Tangent 1-form, induced metric, regularity, Gaussian curvature and the
// Weierstrass integration X = int X_L dxi_L + X_R dxi_R.

#include <vector>

#include "cpsurf/model.hpp"
#include "cpsurf/parallel.hpp"
#include "cpsurf/su.hpp"

namespace cpsurf {

/// X_L = M_L = [d_L P, P], X_R = -M_R, as order-2 matrix jets.
struct TangentPair {
  MatJet left;
  MatJet right;
};

TangentPair tangent_form(const FieldJet& f);

/// Values only, from M_D = (P d_D f f^dag - f d_D f^dag P) / |f|^2.
struct TangentValues {
  SuElement left;
  SuElement right;
};

TangentValues tangent_values(const FieldJet& f);

/// || d_R X_L - d_L X_R ||_F.
double closedness_residual(const TangentPair& t);

enum class Regularity { Regular, DegenerateConditionsViolated, PositiveSemidefiniteBoundary };

const char* to_string(Regularity r);

struct MetricSample {
  double j_left = 0.0;
  double g_lr = 0.0;
  double j_right = 0.0;
  double det_g = 0.0;
  Regularity regularity = Regularity::DegenerateConditionsViolated;

  bool regular() const { return regularity == Regularity::Regular; }
};

/// rel (1 + J_L + J_R)^2 with rel = 1e-9 unless changed process-wide.
double det_g_tolerance(double j_left, double j_right);
void set_det_g_relative_tolerance(double rel);
double det_g_relative_tolerance();

struct RegularityReport {
  MetricSample metric;
  double det_tolerance = 0.0;
  double im_left_right = 0.0;  // Im(d_L f^dag P d_R f) / |f|^2
  bool im_condition = false;
  double min_singular_value = 0.0;  // of [f, d_L f, d_R f]; 0 when N = 2
  double rank_tolerance = 0.0;
  bool independence_condition = false;
};

RegularityReport classify_regularity(const FieldJet& f);

/// Metric from the field formula; the regularity flag is filled in.
MetricSample induced_metric(const FieldJet& f);

/// Metric from (X_B, X_D) = -1/2 tr(X_B X_D); regularity from detG only.
MetricSample metric_from_tangents(const SuElement& x_left, const SuElement& x_right);

struct MetricJets {
  Jet2 j_left;
  Jet2 g_lr;
  Jet2 j_right;
};

/// J_D = tr(d_D P d_D P) / 2, G_LR = -tr(d_L P d_R P) / 2 as order-2 jets.
MetricJets metric_jets(const FieldJet& f);

/// K = (1/sqrt detG) d_R[(d_L G_LR - G_LR d_L ln J_L / 2) / sqrt detG].
/// Throws DegeneratePoint or ZeroJL.
double gaussian_curvature(const FieldJet& f);

// ---------------------------------------------------------------------------
// Weierstrass integration.

struct QuadratureOptions {
  int initial_panels = 64;  // per full leg; segments get a proportional share
  int max_panels = 4096;
  double tolerance = 1e-9;
  bool check_regularity = true;
};

enum class Staircase { LeftThenRight, RightThenLeft };

struct Grid {
  double l_min = 0.0, l_max = 1.0;
  double r_min = 0.0, r_max = 1.0;
  int n_l = 2, n_r = 2;

  double xi_l(int i) const { return n_l == 1 ? l_min : l_min + (l_max - l_min) * i / (n_l - 1); }
  double xi_r(int j) const { return n_r == 1 ? r_min : r_min + (r_max - r_min) * j / (n_r - 1); }
  Point at(int i, int j) const { return {xi_l(i), xi_r(j)}; }
  int size() const { return n_l * n_r; }
  int index(int i, int j) const { return i * n_r + j; }
};

/// Composite Simpson of X_dir along xi_dir from `from` to coordinate `to`.
SuElement simpson_leg(const SolutionSpec& spec, const Point& from, Dir dir, double to, int panels);

/// X(target) - X(base) along one staircase path.
SuElement integrate_path(const SolutionSpec& spec, const Point& base, const Point& target,
                         Staircase order = Staircase::LeftThenRight, const QuadratureOptions& opts = {});

struct Immersion {
  Grid grid;
  Point base;
  std::vector<SuElement> x;  // grid.index(i, j)

  const SuElement& at(int i, int j) const { return x[grid.index(i, j)]; }
};

/// X on every grid node with X(base) = 0. Throws SingularPathError when
/// check_regularity is set and detG <= tolerance at a node or quadrature point.
Immersion integrate_immersion(const SolutionSpec& spec, const Point& base, const Grid& grid,
                              const QuadratureOptions& opts = {}, Staircase order = Staircase::LeftThenRight,
                              Execution exec = Execution::Parallel);

}  // namespace cpsurf
