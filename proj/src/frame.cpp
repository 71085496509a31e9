#include "cpsurf/frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

namespace cpsurf {

namespace {

void put(MatJet& m, int r, int c, const Jet2& x) {
  for (int t = 0; t < kJetTerms; ++t) m.c[t](r, c) = x.c[t];
  m.order = std::min(m.order, x.order);
}

Jet2 abs2(const Jet2& x) { return jet_real(x * jet_conj(x)); }

SuElement normal_part(const SuElement& v, const SuElement& xl, const SuElement& xr, const MetricSample& m) {
  const double bl = su_inner(v, xl), br = su_inner(v, xr);
  const double cl = (m.j_right * bl - m.g_lr * br) / m.det_g;
  const double cr = (m.j_left * br - m.g_lr * bl) / m.det_g;
  return v - cl * xl - cr * xr;
}

void require_regular(const MetricSample& m) {
  if (!m.regular()) throw Error(ErrorKind::DegeneratePoint, "detG <= tolerance");
}

}  // namespace

MatJet build_phi_jet(const std::vector<Jet2>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<Jet2> a2(n);
  double scale2 = 0.0;
  for (int j = 0; j < n; ++j) {
    a2[j] = abs2(f[j]);
    scale2 += a2[j].value().real();
  }
  const double scale = std::sqrt(scale2);
  if (scale < kJetEpsilon) throw Error(ErrorKind::ZeroVector, "Phi needs f != 0");
  const double vanish = 1e-13 * scale;

  // rho[k] = sqrt(sum_{j >= k} |f_j|^2), 0-based.
  std::vector<Jet2> tail(n + 1, Jet2::constant(0.0));
  for (int j = n - 1; j >= 0; --j) tail[j] = tail[j + 1] + a2[j];
  auto rho = [&](int k) -> Jet2 {
    if (std::sqrt(std::max(0.0, tail[k].value().real())) < vanish) return Jet2::constant(0.0);
    return jet_apply(ElementaryFn::Sqrt, tail[k]);
  };

  MatJet phi_dag = identity_jet(n);
  for (int k = 0; k + 1 < n; ++k) {
    MatJet block = identity_jet(n);
    if (k == n - 2) {
      const Jet2 r = rho(k);
      if (std::abs(r.value()) < vanish) continue;
      const Jet2 inv = jet_reciprocal(r);
      put(block, k, k, jet_conj(f[k]) * inv);
      put(block, k, k + 1, jet_conj(f[k + 1]) * inv);
      put(block, k + 1, k, -(f[k + 1] * inv));
      put(block, k + 1, k + 1, f[k] * inv);
    } else {
      const Jet2 rk = rho(k);
      if (std::abs(rk.value()) < vanish) continue;
      const Jet2 inv = jet_reciprocal(rk);
      const Jet2 ratio = rho(k + 1) * inv;
      put(block, k, k, jet_conj(f[k]) * inv);
      put(block, k, k + 1, ratio);
      put(block, k + 1, k, -ratio);
      put(block, k + 1, k + 1, f[k] * inv);
    }
    phi_dag = phi_dag * block;
  }
  return adjoint(phi_dag);
}

Eigen::MatrixXcd build_phi(const Eigen::VectorXcd& f0) {
  std::vector<Jet2> f(f0.size());
  for (int j = 0; j < f0.size(); ++j) f[j] = Jet2::constant(f0[j]);
  return build_phi_jet(f).value();
}

Frame build_frame(const FieldJet& f) {
  const RegularityReport reg = classify_regularity(f);
  require_regular(reg.metric);
  const int n = f.n();
  const TangentPair t = tangent_form(f);
  const MatJet phi = build_phi_jet(f.components);
  const MatJet phi_dag = adjoint(phi);

  struct Candidate {
    MatJet m;
    std::string label;
  };
  std::vector<Candidate> cands;
  cands.push_back({phi_dag * t.left * phi, "dLX"});
  cands.push_back({phi_dag * t.right * phi, "dRX"});
  for (int k = 2; k <= n; ++k) {
    cands.push_back({MatJet::constant(basis_a(n, 1, k)), "A1" + std::to_string(k)});
    cands.push_back({MatJet::constant(basis_b(n, 1, k)), "B1" + std::to_string(k)});
  }

  std::vector<MatJet> kept;
  std::vector<std::string> kept_labels;
  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const double input = std::sqrt(std::max(0.0, su_inner(cands[ci].m, cands[ci].m).value().real()));
    MatJet v = cands[ci].m;
    for (int pass = 0; pass < 2; ++pass) {
      for (const MatJet& e : kept) v -= su_inner(v, e) * e;
    }
    const double resid = std::sqrt(std::max(0.0, su_inner(v, v).value().real()));
    if (ci < 2 && resid < 1e-8 * input) throw Error(ErrorKind::DegeneratePoint, "tangents are dependent");
    if (resid < 1e-8 * input) continue;
    kept.push_back(jet_reciprocal(jet_apply(ElementaryFn::Sqrt, su_inner(v, v))) * v);
    kept_labels.push_back(cands[ci].label);
  }
  const int expected = 2 * (n - 1) - 2;
  if (static_cast<int>(kept.size()) - 2 != expected) {
    throw Error(ErrorKind::GramSchmidtRankDeficiency,
                std::to_string(kept.size() - 2) + " Gram-Schmidt normals, expected " + std::to_string(expected));
  }

  Frame fr;
  fr.point = f.point;
  fr.x_left = t.left;
  fr.x_right = t.right;
  fr.d_left = t.left.value();
  fr.d_right = t.right.value();
  fr.phi = phi.value();
  fr.gram_schmidt_count = expected;
  auto add = [&](const MatJet& tilde, const std::string& label) {
    MatJet nj = phi * tilde * phi_dag;
    fr.normals.push_back(nj.value());
    fr.normal_jets.push_back(std::move(nj));
    fr.labels.push_back(label);
  };
  for (std::size_t k = 2; k < kept.size(); ++k) add(kept[k], kept_labels[k] + "~");
  for (const BasisElement& b : su_basis(n)) {
    if (b.family != 'C' && b.j == 1) continue;
    add(MatJet::constant(b.matrix), b.label());
  }
  return fr;
}

Eigen::MatrixXd normalization_table(const FieldJet& f, const Frame& frame) {
  const MetricSample m = induced_metric(f);
  const int d = frame.dim();
  std::vector<SuElement> tau(d);
  for (int r = 0; r < d; ++r) tau[r] = frame.tau(r);
  Eigen::MatrixXd table = su_gram(tau);
  table(0, 0) -= m.j_left;
  table(0, 1) -= m.g_lr;
  table(1, 0) -= m.g_lr;
  table(1, 1) -= m.j_right;
  for (int r = 2; r < d; ++r) table(r, r) -= 1.0;
  return table;
}

GWData gw_coefficients(const FieldJet& f, const Frame& frame) {
  GWData gw;
  gw.metric = metric_from_tangents(frame.d_left, frame.d_right);
  require_regular(gw.metric);
  const MetricSample& m = gw.metric;
  if (!(m.det_g > 0.0) || !std::isfinite(m.det_g)) throw Error(ErrorKind::LinearSolveFailure, "singular metric");
  (void)f;

  const SuElement ll = derivative(frame.x_left, Dir::L).value();
  const SuElement rr = derivative(frame.x_right, Dir::R).value();
  const SuElement lr =
      0.5 * (derivative(frame.x_left, Dir::R).value() + derivative(frame.x_right, Dir::L).value());

  auto solve = [&](const SuElement& dd) {
    const double bl = su_inner(dd, frame.d_left), br = su_inner(dd, frame.d_right);
    Eigen::Vector2d a((m.j_right * bl - m.g_lr * br) / m.det_g, (m.j_left * br - m.g_lr * bl) / m.det_g);
    if (!a.allFinite()) throw Error(ErrorKind::LinearSolveFailure, "non-finite A coefficients");
    return a;
  };
  gw.a_left.row(0) = solve(ll);
  gw.a_right.row(0) = solve(rr);
  gw.a_left.row(1).setZero();
  gw.a_right.row(1).setZero();

  const int k = static_cast<int>(frame.normals.size());
  gw.q_left.resize(k);
  gw.q_right.resize(k);
  gw.h_tilde.resize(k);
  for (int j = 0; j < k; ++j) {
    gw.q_left[j] = su_inner(ll, frame.normals[j]);
    gw.q_right[j] = su_inner(rr, frame.normals[j]);
    gw.h_tilde[j] = su_inner(lr, frame.normals[j]);
  }
  gw.alpha_left = (gw.h_tilde * m.g_lr - gw.q_left * m.j_right) / m.det_g;
  gw.beta_left = (gw.q_left * m.g_lr - gw.h_tilde * m.j_left) / m.det_g;
  gw.alpha_right = (gw.q_right * m.g_lr - gw.h_tilde * m.j_right) / m.det_g;
  gw.beta_right = (gw.h_tilde * m.g_lr - gw.q_right * m.j_left) / m.det_g;

  auto s_matrix = [&](Dir d) {
    Eigen::MatrixXd s(k, k);
    for (int j = 0; j < k; ++j) {
      const SuElement dn = derivative(frame.normal_jets[j], d).value();
      for (int l = 0; l < k; ++l) s(j, l) = su_inner(dn, frame.normals[l]);
    }
    return s;
  };
  const Eigen::MatrixXd sl = s_matrix(Dir::L), sr = s_matrix(Dir::R);
  gw.s_defect = k == 0 ? 0.0
                       : std::max((sl + sl.transpose()).cwiseAbs().maxCoeff(),
                                  (sr + sr.transpose()).cwiseAbs().maxCoeff());
  gw.s_left = 0.5 * (sl - sl.transpose());
  gw.s_right = 0.5 * (sr - sr.transpose());

  const int d = k + 2;
  gw.u = Eigen::MatrixXd::Zero(d, d);
  gw.v = Eigen::MatrixXd::Zero(d, d);
  gw.u(0, 0) = gw.a_left(0, 0);
  gw.u(0, 1) = gw.a_left(0, 1);
  gw.u.block(0, 2, 1, k) = gw.q_left.transpose();
  gw.u.block(1, 2, 1, k) = gw.h_tilde.transpose();
  gw.u.block(2, 0, k, 1) = gw.alpha_left;
  gw.u.block(2, 1, k, 1) = gw.beta_left;
  gw.u.block(2, 2, k, k) = gw.s_left;
  gw.v.block(0, 2, 1, k) = gw.h_tilde.transpose();
  gw.v(1, 0) = gw.a_right(0, 0);
  gw.v(1, 1) = gw.a_right(0, 1);
  gw.v.block(1, 2, 1, k) = gw.q_right.transpose();
  gw.v.block(2, 0, k, 1) = gw.alpha_right;
  gw.v.block(2, 1, k, 1) = gw.beta_right;
  gw.v.block(2, 2, k, k) = gw.s_right;
  return gw;
}

Eigen::Matrix2d a_coefficients_closed_form(const FieldJet& f) {
  const MetricSample m = induced_metric(f);
  require_regular(m);
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;

  // Row for direction D with "other" direction O; J_D, J_O the matching currents.
  auto row = [&](const Eigen::VectorXcd& fd, const Eigen::VectorXcd& fo, const Eigen::VectorXcd& fdd, double jd,
                 double jo) {
    const cplx dfd_f = fd.dot(v);       // d_D f^dag f
    const cplx f_dfd = v.dot(fd);       // f^dag d_D f
    const cplx mixed = fd.dot(p * fo);  // d_D f^dag P d_O f
    const cplx same = (jo * fd + m.g_lr * fo).dot(p * fdd) / n2;
    const cplx other = (jd * fo + m.g_lr * fd).dot(p * fdd) / n2;
    const double a_d = (same - 2.0 * dfd_f / (n2 * n2) * mixed * m.g_lr - 2.0 * f_dfd / n2 * jd * jo).real();
    const double a_o = (-other + 2.0 * dfd_f / (n2 * n2) * mixed * jd + 2.0 * f_dfd / n2 * jd * m.g_lr).real();
    return Eigen::Vector2d(a_d / m.det_g, a_o / m.det_g);
  };
  const Eigen::VectorXcd fl = f.partial(1, 0), fr = f.partial(0, 1);
  const Eigen::Vector2d l = row(fl, fr, f.partial(2, 0), m.j_left, m.j_right);
  const Eigen::Vector2d r = row(fr, fl, f.partial(0, 2), m.j_right, m.j_left);
  Eigen::Matrix2d out;
  out << l[0], l[1], r[1], r[0];
  return out;
}

Reconstruction gw_reconstruction_residual(const Frame& frame, const GWData& gw) {
  const int d = frame.dim();
  auto worst = [&](Dir dir, const Eigen::MatrixXd& w) {
    double out = 0.0;
    for (int r = 0; r < d; ++r) {
      const MatJet& src = r == 0 ? frame.x_left : r == 1 ? frame.x_right : frame.normal_jets[r - 2];
      SuElement res = derivative(src, dir).value();
      for (int c = 0; c < d; ++c) res -= w(r, c) * frame.tau(c);
      out = std::max(out, res.norm());
    }
    return out;
  };
  return {worst(Dir::L, gw.u), worst(Dir::R, gw.v)};
}

double gauss_codazzi_residual(const SolutionSpec& spec, const Point& at, double h) {
  auto gw_at = [&](double dl, double dr) {
    const FieldJet f = eval_field(spec, {at.xi_l + dl, at.xi_r + dr});
    return gw_coefficients(f, build_frame(f));
  };
  const GWData c = gw_at(0, 0);
  const Eigen::MatrixXd du = (gw_at(0, h).u - gw_at(0, -h).u) / (2.0 * h);
  const Eigen::MatrixXd dv = (gw_at(h, 0).v - gw_at(-h, 0).v) / (2.0 * h);
  return (du - dv + c.u * c.v - c.v * c.u).norm();
}

SecondDerivatives second_derivatives_closed_form(const FieldJet& f) {
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(f.n(), f.n()) - v * v.adjoint() / n2;
  const Eigen::VectorXcd fl = f.partial(1, 0), fr = f.partial(0, 1);
  const Eigen::VectorXcd fll = f.partial(2, 0), frr = f.partial(0, 2);
  const double n4 = n2 * n2;
  SecondDerivatives s;
  s.ll = (p * fll * v.adjoint() - v * fll.adjoint() * p) / n2 +
         2.0 / n4 * (fl.dot(v) * v * fl.adjoint() * p - v.dot(fl) * p * fl * v.adjoint());
  s.rr = (v * frr.adjoint() * p - p * frr * v.adjoint()) / n2 +
         2.0 / n4 * (v.dot(fr) * p * fr * v.adjoint() - fr.dot(v) * v * fr.adjoint() * p);
  s.lr = (p * fl * fr.adjoint() * p - p * fr * fl.adjoint() * p) / n2 +
         (fl.dot(p * fr) - fr.dot(p * fl)) / n4 * v * v.adjoint();
  return s;
}

SecondFundamentalForm second_fundamental_form(const FieldJet& f, const Frame& frame) {
  (void)f;
  const MetricSample m = metric_from_tangents(frame.d_left, frame.d_right);
  require_regular(m);
  const SuElement ll = derivative(frame.x_left, Dir::L).value();
  const SuElement rr = derivative(frame.x_right, Dir::R).value();
  const SuElement lr =
      0.5 * (derivative(frame.x_left, Dir::R).value() + derivative(frame.x_right, Dir::L).value());
  return {normal_part(ll, frame.d_left, frame.d_right, m), normal_part(lr, frame.d_left, frame.d_right, m),
          normal_part(rr, frame.d_left, frame.d_right, m)};
}

MeanCurvature mean_curvature(const FieldJet& f, const Frame& frame) {
  const SecondFundamentalForm ii = second_fundamental_form(f, frame);
  const MetricSample m = metric_from_tangents(frame.d_left, frame.d_right);
  MeanCurvature h;
  h.vector = (m.j_right * ii.ll - 2.0 * m.g_lr * ii.lr + m.j_left * ii.rr) / (2.0 * m.det_g);
  h.norm = su_norm(h.vector);
  if (f.n() == 2) {
    const SuElement& n = frame.normals.front();
    h.scalar = su_inner(h.vector, n) / su_inner(n, n);
  }
  return h;
}

Cp1Shortcuts cp1_shortcuts(const FieldJet& f) {
  if (f.n() != 2) throw Error(ErrorKind::InvalidSpec, "CP1 closed forms need N = 2");
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
  const Eigen::MatrixXcd p = eye - v * v.adjoint() / n2;
  const Eigen::MatrixXcd q = eye - 2.0 * p;
  const Eigen::VectorXcd fl = f.partial(1, 0), fr = f.partial(0, 1);
  const cplx c = fr.dot(p * fl), cc = std::conj(c);
  Cp1Shortcuts s;
  s.ii_mixed_literal = -2.0 * (c - cc) * q;
  s.ii_mixed = s.ii_mixed_literal / n2;
  s.h_corrected = 2.0 * (c + cc) / (c - cc) * q;
  s.h_literal = 2.0 * (c + cc) / (c - fr.dot(p * fr)) * q;
  s.normal = cplx(0.0, 1.0) * q;
  return s;
}

AltNormals alt_normals(const FieldJet& f) {
  const int n = f.n();
  const Eigen::VectorXcd v = f.value();
  const double n2 = v.squaredNorm();
  if (std::sqrt(n2) < kJetEpsilon) throw Error(ErrorKind::ZeroField, "|f| = 0");
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd p = eye - v * v.adjoint() / n2;
  AltNormals out;
  out.n_p = cplx(0.0, std::sqrt(2.0)) * (std::sqrt((n - 1.0) / n) * eye - std::sqrt(n / (n - 1.0)) * p);
  const TangentValues t = tangent_values(f);
  const SuElement comm = t.left * t.right - t.right * t.left;
  const double size = su_norm(comm);
  if (size <= 1e-12 * (1.0 + su_norm(t.left) * su_norm(t.right))) {
    throw Error(ErrorKind::VanishingCommutator, "[X_L, X_R] = 0");
  }
  out.n_comm = comm / size;
  return out;
}

SpanResiduals span_residuals(const FieldJet& f, const Frame& frame) {
  const SecondFundamentalForm ii = second_fundamental_form(f, frame);
  const int gs = frame.gram_schmidt_count;
  const int k = static_cast<int>(frame.normals.size());
  auto outside = [&](const SuElement& x, int lo, int hi) {
    double s = 0.0;
    for (int j = lo; j < hi; ++j) {
      const double c = su_inner(x, frame.normals[j]);
      s += c * c;
    }
    return std::sqrt(s);
  };
  return {outside(ii.ll, gs, k), outside(ii.rr, gs, k), outside(ii.lr, 0, gs)};
}

WillmoreResult willmore(const SolutionSpec& spec, double l_min, double l_max, double r_min, double r_max,
                        int panels_l, int panels_r, Execution exec) {
  validate(spec);
  if (panels_l < 2 || panels_r < 2 || panels_l % 2 || panels_r % 2) {
    throw Error(ErrorKind::OddPanelCount, "Simpson needs even panel counts >= 2");
  }
  WillmoreResult out;
  out.panels_l = panels_l;
  out.panels_r = panels_r;
  if (l_min == l_max || r_min == r_max) return out;

  const int nl = panels_l + 1, nr = panels_r + 1;
  const double hl = (l_max - l_min) / panels_l, hr = (r_max - r_min) / panels_r;
  std::vector<double> g(nl * nr);
  std::vector<std::exception_ptr> err(nl * nr);
  auto sample = [&](int idx) {
    const int i = idx / nr, j = idx % nr;
    const Point at{l_min + hl * i, r_min + hr * j};
    try {
      const FieldJet f = eval_field(spec, at);
      const RegularityReport reg = classify_regularity(f);
      if (!reg.metric.regular()) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "grid point (%d, %d) at (%.6g, %.6g) has detG=%.3e", i, j, at.xi_l, at.xi_r,
                      reg.metric.det_g);
        throw Error(ErrorKind::SingularGridPoint, buf);
      }
      const MeanCurvature h = mean_curvature(f, build_frame(f));
      g[idx] = h.norm * h.norm * std::sqrt(reg.metric.det_g);
    } catch (...) {
      err[idx] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < nl * nr; ++idx) sample(idx);
  } else {
    for (int idx = 0; idx < nl * nr; ++idx) sample(idx);
  }
  for (const auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  auto w = [](int k, int n) { return k == 0 || k == n ? 1.0 : k % 2 ? 4.0 : 2.0; };
  double sum = 0.0;
  for (int i = 0; i < nl; ++i) {
    for (int j = 0; j < nr; ++j) sum += w(i, panels_l) * w(j, panels_r) * g[i * nr + j];
  }
  out.value = sum * hl * hr / 9.0;
  return out;
}

}  // namespace cpsurf
