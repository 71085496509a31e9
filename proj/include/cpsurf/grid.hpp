#pragma once

// Per-grid-point sweeps. Each point is independent; the parallel versions
// write into preallocated slots and rethrow the first failure in index order,
// so results and errors match the serial loops exactly.

#include <optional>
#include <vector>

#include "cpsurf/frame.hpp"

namespace cpsurf {

struct CheckSample {
  double el = 0.0;            // normalized Euler-Lagrange residual
  double conservation = 0.0;  // max(|d_L J_R|, |d_R J_L|)
  double closedness = 0.0;    // || d_R X_L - d_L X_R ||_F
};

std::vector<CheckSample> check_sweep(const SolutionSpec& spec, const Grid& grid,
                                     Execution exec = Execution::Parallel);

struct GeometrySample {
  Point point;
  MetricSample metric;
  std::optional<double> k;       // empty at degenerate points or when J_L = 0
  std::optional<double> h_norm;  // empty at degenerate points
};

std::vector<GeometrySample> geometry_sweep(const SolutionSpec& spec, const Grid& grid,
                                           Execution exec = Execution::Parallel);

}  // namespace cpsurf
