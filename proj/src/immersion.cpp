#include "cpsurf/immersion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>

#include <omp.h>

namespace cpsurf {

int max_threads() { return omp_get_max_threads(); }

TangentPair tangent_form(const FieldJet& f) {
  const MatJet p = projector(f);
  const MatJet ml = commutator(derivative(p, Dir::L), p);
  const MatJet mr = commutator(derivative(p, Dir::R), p);
  return {ml, -mr};
}

TangentValues tangent_values(const FieldJet& f) {
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;
  auto m = [&](const Eigen::VectorXcd& d) -> Eigen::MatrixXcd {
    return (p * d * v.adjoint() - v * d.adjoint() * p) / n2;
  };
  return {m(f.partial(1, 0)), -m(f.partial(0, 1))};
}

double closedness_residual(const TangentPair& t) {
  return (derivative(t.left, Dir::R).value() - derivative(t.right, Dir::L).value()).norm();
}

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::Regular: return "regular";
    case Regularity::DegenerateConditionsViolated: return "degenerate_conditions_violated";
    case Regularity::PositiveSemidefiniteBoundary: return "positive_semidefinite_boundary";
  }
  return "unknown";
}

namespace {
std::atomic<double> g_det_rel{1e-9};
}

void set_det_g_relative_tolerance(double rel) { g_det_rel.store(rel); }
double det_g_relative_tolerance() { return g_det_rel.load(); }

double det_g_tolerance(double j_left, double j_right) {
  const double s = 1.0 + j_left + j_right;
  return g_det_rel.load(std::memory_order_relaxed) * s * s;
}

namespace {

MetricSample field_metric(const FieldJet& f, Eigen::MatrixXcd* proj) {
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;
  const Eigen::VectorXcd dl = f.partial(1, 0), dr = f.partial(0, 1);
  MetricSample m;
  m.j_left = dl.dot(p * dl).real() / n2;
  m.j_right = dr.dot(p * dr).real() / n2;
  m.g_lr = -dr.dot(p * dl).real() / n2;
  m.det_g = m.j_left * m.j_right - m.g_lr * m.g_lr;
  if (proj) *proj = p;
  return m;
}

}  // namespace

RegularityReport classify_regularity(const FieldJet& f) {
  RegularityReport r;
  Eigen::MatrixXcd p;
  r.metric = field_metric(f, &p);
  r.det_tolerance = det_g_tolerance(r.metric.j_left, r.metric.j_right);
  const Eigen::VectorXcd v = f.value();
  const Eigen::VectorXcd dl = f.partial(1, 0), dr = f.partial(0, 1);
  r.im_left_right = dl.dot(p * dr).imag() / v.squaredNorm();
  r.im_condition = std::abs(r.im_left_right) > std::sqrt(r.det_tolerance);

  Eigen::MatrixXcd span(f.n(), 3);
  span << v, dl, dr;
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(span);
  const auto& sv = svd.singularValues();
  r.min_singular_value = f.n() >= 3 ? sv[2] : 0.0;
  r.rank_tolerance = 1e-8 * span.norm();
  r.independence_condition = f.n() >= 3 && r.min_singular_value > r.rank_tolerance;

  if (r.metric.det_g > r.det_tolerance) {
    r.metric.regularity = Regularity::Regular;
  } else if (!r.im_condition && !r.independence_condition) {
    r.metric.regularity = Regularity::DegenerateConditionsViolated;
  } else {
    r.metric.regularity = Regularity::PositiveSemidefiniteBoundary;
  }
  return r;
}

MetricSample induced_metric(const FieldJet& f) { return classify_regularity(f).metric; }

MetricSample metric_from_tangents(const SuElement& x_left, const SuElement& x_right) {
  MetricSample m;
  m.j_left = su_inner(x_left, x_left);
  m.j_right = su_inner(x_right, x_right);
  m.g_lr = su_inner(x_left, x_right);
  m.det_g = m.j_left * m.j_right - m.g_lr * m.g_lr;
  m.regularity = m.det_g > det_g_tolerance(m.j_left, m.j_right) ? Regularity::Regular
                                                                 : Regularity::DegenerateConditionsViolated;
  return m;
}

MetricJets metric_jets(const FieldJet& f) {
  const MatJet p = projector(f);
  const MatJet dl = derivative(p, Dir::L), dr = derivative(p, Dir::R);
  MetricJets m;
  m.j_left = jet_real(cplx(0.5) * trace(dl * dl));
  m.j_right = jet_real(cplx(0.5) * trace(dr * dr));
  m.g_lr = jet_real(cplx(-0.5) * trace(dl * dr));
  return m;
}

double gaussian_curvature(const FieldJet& f) {
  const RegularityReport r = classify_regularity(f);
  if (!r.metric.regular()) throw Error(ErrorKind::DegeneratePoint, "detG <= tolerance");
  if (r.metric.j_left < kJetEpsilon) throw Error(ErrorKind::ZeroJL, "J_L = 0");
  const MetricJets m = metric_jets(f);
  const Jet2 det = m.j_left * m.j_right - m.g_lr * m.g_lr;
  const Jet2 root = jet_apply(ElementaryFn::Sqrt, det);
  const Jet2 num = derivative(m.g_lr, Dir::L) -
                   cplx(0.5) * m.g_lr * derivative(jet_apply(ElementaryFn::Log, m.j_left), Dir::L);
  const Jet2 t = jet_div(num, root);
  return derivative(t, Dir::R).value().real() / root.value().real();
}

// ---------------------------------------------------------------------------

namespace {

Point along(const Point& from, Dir dir, double t) {
  return dir == Dir::L ? Point{t, from.xi_r} : Point{from.xi_l, t};
}

struct Integrand {
  const SolutionSpec& spec;
  Dir dir;
  Point fixed;
  bool check;

  // Returns X_dir; on a degenerate point reports it through `bad`.
  SuElement operator()(double t, std::optional<Point>* bad, double* bad_det) const {
    const Point at = along(fixed, dir, t);
    const FieldJet f = eval_field(spec, at);
    const TangentValues tv = tangent_values(f);
    if (check && bad && !bad->has_value()) {
      const MetricSample m = metric_from_tangents(tv.left, tv.right);
      if (!m.regular()) {
        *bad = at;
        *bad_det = m.det_g;
      }
    }
    return dir == Dir::L ? tv.left : tv.right;
  }
};

SuElement simpson_sum(const std::vector<SuElement>& y, double h) {
  SuElement s = y.front() + y.back();
  for (std::size_t k = 1; k + 1 < y.size(); ++k) s += (k % 2 ? 4.0 : 2.0) * y[k];
  return s * (h / 3.0);
}

struct SegmentResult {
  SuElement value;
  std::optional<Point> bad;
  double bad_det = 0.0;
};

// Simpson with panel doubling until the Richardson estimate meets tol.
SegmentResult adaptive_segment(const Integrand& g, double a, double b, int panels,
                               const QuadratureOptions& opts) {
  SegmentResult out;
  std::vector<SuElement> y(panels + 1);
  for (int k = 0; k <= panels; ++k) y[k] = g(a + (b - a) * k / panels, &out.bad, &out.bad_det);
  SuElement s = simpson_sum(y, (b - a) / panels);
  while (true) {
    if (out.bad) return out;
    const int fine = 2 * panels;
    if (fine > opts.max_panels) {
      throw Error(ErrorKind::QuadratureNonConvergence,
                  "Simpson did not converge within " + std::to_string(opts.max_panels) + " panels");
    }
    std::vector<SuElement> z(fine + 1);
    for (int k = 0; k <= fine; ++k) {
      z[k] = k % 2 == 0 ? y[k / 2] : g(a + (b - a) * k / fine, &out.bad, &out.bad_det);
    }
    const SuElement s2 = simpson_sum(z, (b - a) / fine);
    const double est = (s2 - s).norm() / 15.0;
    y.swap(z);
    panels = fine;
    s = s2;
    if (est <= opts.tolerance) break;
  }
  out.value = s;
  return out;
}

int starting_panels(double length, double extent, const QuadratureOptions& opts) {
  if (extent <= 0.0) return 2;
  int n = static_cast<int>(std::ceil(opts.initial_panels * std::abs(length) / extent));
  if (n % 2) ++n;
  return std::max(2, n);
}

// One unit of work: integrate X_dir along xi_dir from `a` to `b` at `fixed`.
struct Segment {
  Dir dir;
  Point fixed;
  double a, b;
  double extent;
  int grid_l, grid_r;  // grid node reached at the end of the segment
};

struct SegmentOutcome {
  SuElement value;
  std::exception_ptr error;
};

SegmentOutcome run_segment(const SolutionSpec& spec, const Segment& s, const QuadratureOptions& opts) {
  SegmentOutcome out;
  try {
    if (s.a == s.b) {
      out.value = SuElement::Zero(spec.n, spec.n);
      return out;
    }
    const Integrand g{spec, s.dir, s.fixed, opts.check_regularity};
    SegmentResult r = adaptive_segment(g, s.a, s.b, starting_panels(s.b - s.a, s.extent, opts), opts);
    if (r.bad) {
      throw SingularPathError(s.grid_l, s.grid_r, r.bad->xi_l, r.bad->xi_r, r.bad_det);
    }
    out.value = std::move(r.value);
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

// Segments covering the sorted coordinates `coords` from `start`, outward in
// both directions. `link[k]` is the segment index ending at coords[k];
// `parent[k]` is the coordinate index the segment starts from (-1 = start).
struct LegPlan {
  std::vector<std::pair<double, double>> pieces;
  std::vector<int> parent;
};

LegPlan plan_leg(double start, const std::vector<double>& coords) {
  const int n = static_cast<int>(coords.size());
  LegPlan plan;
  plan.pieces.resize(n);
  plan.parent.assign(n, -1);
  int first_up = static_cast<int>(std::lower_bound(coords.begin(), coords.end(), start) - coords.begin());
  for (int k = first_up; k < n; ++k) {
    const double from = k == first_up ? start : coords[k - 1];
    plan.pieces[k] = {from, coords[k]};
    plan.parent[k] = k == first_up ? -1 : k - 1;
  }
  for (int k = first_up - 1; k >= 0; --k) {
    const double from = k == first_up - 1 ? start : coords[k + 1];
    plan.pieces[k] = {from, coords[k]};
    plan.parent[k] = k == first_up - 1 ? -1 : k + 1;
  }
  return plan;
}

// Accumulate along the plan; segment values in `seg`, result per coordinate.
std::vector<SuElement> accumulate(const LegPlan& plan, const std::vector<SuElement>& seg, const SuElement& origin,
                                  double start, const std::vector<double>& coords) {
  const int n = static_cast<int>(coords.size());
  std::vector<SuElement> out(n);
  const int first_up = static_cast<int>(std::lower_bound(coords.begin(), coords.end(), start) - coords.begin());
  for (int k = first_up; k < n; ++k) out[k] = (plan.parent[k] < 0 ? origin : out[plan.parent[k]]) + seg[k];
  for (int k = first_up - 1; k >= 0; --k) out[k] = (plan.parent[k] < 0 ? origin : out[plan.parent[k]]) + seg[k];
  return out;
}

double extent_of(double start, const std::vector<double>& coords) {
  const double lo = std::min(start, coords.front()), hi = std::max(start, coords.back());
  return hi - lo;
}

void run_all(const SolutionSpec& spec, const std::vector<Segment>& segs, const QuadratureOptions& opts,
             Execution exec, std::vector<SuElement>& values) {
  const int m = static_cast<int>(segs.size());
  std::vector<SegmentOutcome> out(m);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < m; ++k) out[k] = run_segment(spec, segs[k], opts);
  } else {
    for (int k = 0; k < m; ++k) out[k] = run_segment(spec, segs[k], opts);
  }
  values.resize(m);
  for (int k = 0; k < m; ++k) {
    if (out[k].error) std::rethrow_exception(out[k].error);
    values[k] = std::move(out[k].value);
  }
}

}  // namespace

SuElement simpson_leg(const SolutionSpec& spec, const Point& from, Dir dir, double to, int panels) {
  if (panels < 2 || panels % 2) throw Error(ErrorKind::OddPanelCount, "Simpson needs an even panel count >= 2");
  const double a = dir == Dir::L ? from.xi_l : from.xi_r;
  const Integrand g{spec, dir, from, false};
  std::vector<SuElement> y(panels + 1);
  for (int k = 0; k <= panels; ++k) y[k] = g(a + (to - a) * k / panels, nullptr, nullptr);
  return simpson_sum(y, (to - a) / panels);
}

SuElement integrate_path(const SolutionSpec& spec, const Point& base, const Point& target, Staircase order,
                         const QuadratureOptions& opts) {
  validate(spec);
  const bool left_first = order == Staircase::LeftThenRight;
  const Dir d1 = left_first ? Dir::L : Dir::R, d2 = left_first ? Dir::R : Dir::L;
  const Point corner = left_first ? Point{target.xi_l, base.xi_r} : Point{base.xi_l, target.xi_r};
  auto coord = [](const Point& p, Dir d) { return d == Dir::L ? p.xi_l : p.xi_r; };
  std::vector<Segment> segs = {
      {d1, base, coord(base, d1), coord(target, d1), std::abs(coord(target, d1) - coord(base, d1)), -1, -1},
      {d2, corner, coord(corner, d2), coord(target, d2), std::abs(coord(target, d2) - coord(corner, d2)), -1, -1}};
  std::vector<SuElement> v;
  run_all(spec, segs, opts, Execution::Serial, v);
  return v[0] + v[1];
}

Immersion integrate_immersion(const SolutionSpec& spec, const Point& base, const Grid& grid,
                              const QuadratureOptions& opts, Staircase order, Execution exec) {
  validate(spec);
  if (grid.n_l < 1 || grid.n_r < 1) throw Error(ErrorKind::InvalidSpec, "empty grid");
  Immersion out;
  out.grid = grid;
  out.base = base;
  out.x.resize(grid.size());

  std::vector<double> ls(grid.n_l), rs(grid.n_r);
  for (int i = 0; i < grid.n_l; ++i) ls[i] = grid.xi_l(i);
  for (int j = 0; j < grid.n_r; ++j) rs[j] = grid.xi_r(j);
  if (ls.front() > ls.back()) std::reverse(ls.begin(), ls.end());
  if (rs.front() > rs.back()) std::reverse(rs.begin(), rs.end());

  if (opts.check_regularity) {
    std::vector<std::exception_ptr> err(grid.size());
    auto check_node = [&](int idx) {
      const int i = idx / grid.n_r, j = idx % grid.n_r;
      try {
        const FieldJet f = eval_field(spec, grid.at(i, j));
        const TangentValues tv = tangent_values(f);
        const MetricSample m = metric_from_tangents(tv.left, tv.right);
        if (!m.regular()) throw SingularPathError(i, j, grid.xi_l(i), grid.xi_r(j), m.det_g);
      } catch (...) {
        err[idx] = std::current_exception();
      }
    };
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int idx = 0; idx < grid.size(); ++idx) check_node(idx);
    } else {
      for (int idx = 0; idx < grid.size(); ++idx) check_node(idx);
    }
    for (const auto& e : err) {
      if (e) std::rethrow_exception(e);
    }
  }

  const bool left_first = order == Staircase::LeftThenRight;
  // First leg runs along the outer direction at the base's other coordinate.
  const std::vector<double>& outer = left_first ? ls : rs;
  const std::vector<double>& inner = left_first ? rs : ls;
  const Dir d_outer = left_first ? Dir::L : Dir::R, d_inner = left_first ? Dir::R : Dir::L;
  const double start_outer = left_first ? base.xi_l : base.xi_r;
  const double start_inner = left_first ? base.xi_r : base.xi_l;
  const bool outer_rev = left_first ? grid.xi_l(0) > grid.xi_l(grid.n_l - 1) : grid.xi_r(0) > grid.xi_r(grid.n_r - 1);
  const bool inner_rev = left_first ? grid.xi_r(0) > grid.xi_r(grid.n_r - 1) : grid.xi_l(0) > grid.xi_l(grid.n_l - 1);
  const int n_outer = static_cast<int>(outer.size()), n_inner = static_cast<int>(inner.size());
  auto grid_index = [&](int o, int in) {
    const int go = outer_rev ? n_outer - 1 - o : o, gi = inner_rev ? n_inner - 1 - in : in;
    return left_first ? std::pair<int, int>{go, gi} : std::pair<int, int>{gi, go};
  };

  const LegPlan outer_plan = plan_leg(start_outer, outer);
  const LegPlan inner_plan = plan_leg(start_inner, inner);
  const double outer_extent = extent_of(start_outer, outer), inner_extent = extent_of(start_inner, inner);

  std::vector<Segment> segs;
  segs.reserve(n_outer * (n_inner + 1));
  const Point base_fixed = base;
  for (int o = 0; o < n_outer; ++o) {
    const auto idx = grid_index(o, 0);
    const int g_out = left_first ? idx.first : idx.second;
    segs.push_back({d_outer, base_fixed, outer_plan.pieces[o].first, outer_plan.pieces[o].second, outer_extent,
                    left_first ? g_out : -1, left_first ? -1 : g_out});
  }
  for (int o = 0; o < n_outer; ++o) {
    const Point fixed = left_first ? Point{outer[o], base.xi_r} : Point{base.xi_l, outer[o]};
    for (int in = 0; in < n_inner; ++in) {
      const auto [gl, gr] = grid_index(o, in);
      segs.push_back({d_inner, fixed, inner_plan.pieces[in].first, inner_plan.pieces[in].second, inner_extent, gl,
                      gr});
    }
  }

  std::vector<SuElement> values;
  run_all(spec, segs, opts, exec, values);

  const SuElement zero = SuElement::Zero(spec.n, spec.n);
  const std::vector<SuElement> outer_seg(values.begin(), values.begin() + n_outer);
  const std::vector<SuElement> spine = accumulate(outer_plan, outer_seg, zero, start_outer, outer);
  for (int o = 0; o < n_outer; ++o) {
    const std::vector<SuElement> col_seg(values.begin() + n_outer + o * n_inner,
                                         values.begin() + n_outer + (o + 1) * n_inner);
    const std::vector<SuElement> col = accumulate(inner_plan, col_seg, spine[o], start_inner, inner);
    for (int in = 0; in < n_inner; ++in) {
      const auto [gl, gr] = grid_index(o, in);
      out.x[grid.index(gl, gr)] = col[in];
    }
  }
  return out;
}

}  // namespace cpsurf
