#pragma once

namespace cpsurf {

/// Every grid kernel has a plain serial loop kept as the reference and an
/// OpenMP version; both produce bitwise-identical results.
enum class Execution { Serial, Parallel };

int max_threads();

}  // namespace cpsurf
