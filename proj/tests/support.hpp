#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cpsurf/frame.hpp"

namespace fixtures {

using namespace cpsurf;

inline double chi(const Point& p) { return p.xi_l - p.xi_r; }

/// Uniform points in a rectangle, optionally rejecting |chi| < min_chi.
inline std::vector<Point> random_points(int count, double l0, double l1, double r0, double r1, unsigned seed,
                                        double min_chi = 0.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ul(l0, l1), ur(r0, r1);
  std::vector<Point> out;
  while (static_cast<int>(out.size()) < count) {
    const Point p{ul(rng), ur(rng)};
    if (std::abs(chi(p)) >= min_chi) out.push_back(p);
  }
  return out;
}

inline Eigen::MatrixXcd random_unitary(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = cplx(g(rng), g(rng));
  }
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

/// cp1_example embedded as (f1, f2, 0) and rotated by a fixed unitary: a CP^2
/// solution whose (posdef1) condition holds.
inline SolutionSpec rotated_cp1_in_cp2() {
  const SolutionSpec base = make_builtin("cp1_example");
  SolutionSpec s;
  s.n = 3;
  s.components = {base.components[0], base.components[1], make_constant(0.0)};
  s.parameters = base.parameters;
  return apply_global(s, random_unitary(3, 7));
}

/// Metric (E, F, G) = (J_L, G_LR, J_R) from the field formula.
struct MetricValues {
  double e, f, g;
};

inline MetricValues metric_at(const SolutionSpec& s, double l, double r) {
  const MetricSample m = induced_metric(eval_field(s, {l, r}));
  return {m.j_left, m.g_lr, m.j_right};
}

/// Brioschi formula with central differences of the metric (step h).
inline double brioschi(const SolutionSpec& s, const Point& p, double h) {
  auto at = [&](int a, int b) { return metric_at(s, p.xi_l + a * h, p.xi_r + b * h); };
  const MetricValues c = at(0, 0), lp = at(1, 0), lm = at(-1, 0), rp = at(0, 1), rm = at(0, -1);
  const MetricValues pp = at(1, 1), pm = at(1, -1), mp = at(-1, 1), mm = at(-1, -1);
  const double e_u = (lp.e - lm.e) / (2 * h), e_v = (rp.e - rm.e) / (2 * h);
  const double f_u = (lp.f - lm.f) / (2 * h), f_v = (rp.f - rm.f) / (2 * h);
  const double g_u = (lp.g - lm.g) / (2 * h), g_v = (rp.g - rm.g) / (2 * h);
  const double e_vv = (rp.e - 2 * c.e + rm.e) / (h * h);
  const double g_uu = (lp.g - 2 * c.g + lm.g) / (h * h);
  const double f_uv = (pp.f - pm.f - mp.f + mm.f) / (4 * h * h);
  Eigen::Matrix3d a, b;
  a << -0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v, f_v - 0.5 * g_u, c.e, c.f, 0.5 * g_v, c.f, c.g;
  b << 0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, c.e, c.f, 0.5 * g_u, c.f, c.g;
  const double det = c.e * c.g - c.f * c.f;
  return (a.determinant() - b.determinant()) / (det * det);
}

/// Sign-insensitive distance between two su(N) elements.
inline double up_to_sign(const SuElement& a, const SuElement& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

}  // namespace fixtures
