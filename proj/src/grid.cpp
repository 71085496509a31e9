#include "cpsurf/grid.hpp"

#include <exception>

namespace cpsurf {

namespace {

template <class Fn>
void sweep(int count, Execution exec, Fn&& fn) {
  std::vector<std::exception_ptr> err(count);
  auto guarded = [&](int idx) {
    try {
      fn(idx);
    } catch (...) {
      err[idx] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < count; ++idx) guarded(idx);
  } else {
    for (int idx = 0; idx < count; ++idx) guarded(idx);
  }
  for (const auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<CheckSample> check_sweep(const SolutionSpec& spec, const Grid& grid, Execution exec) {
  validate(spec);
  std::vector<CheckSample> out(grid.size());
  sweep(grid.size(), exec, [&](int idx) {
    const FieldJet f = eval_field(spec, grid.at(idx / grid.n_r, idx % grid.n_r));
    out[idx].el = el_residual_norm(f);
    out[idx].conservation = current_conservation_residual(f);
    out[idx].closedness = closedness_residual(tangent_form(f));
  });
  return out;
}

std::vector<GeometrySample> geometry_sweep(const SolutionSpec& spec, const Grid& grid, Execution exec) {
  validate(spec);
  std::vector<GeometrySample> out(grid.size());
  sweep(grid.size(), exec, [&](int idx) {
    GeometrySample& s = out[idx];
    s.point = grid.at(idx / grid.n_r, idx % grid.n_r);
    const FieldJet f = eval_field(spec, s.point);
    s.metric = induced_metric(f);
    if (!s.metric.regular()) return;
    try {
      s.k = gaussian_curvature(f);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroJL) throw;
    }
    s.h_norm = mean_curvature(f, build_frame(f)).norm;
  });
  return out;
}

}  // namespace cpsurf
