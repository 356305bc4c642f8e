#pragma once

namespace conelab {

/// Selects the OpenMP kernel or its serial reference. Both produce
/// bit-identical results; the serial path exists for testing and benchmarks.
enum class Exec { Serial, Parallel };

/// Applies CONELAB_THREADS (if set and positive) as the OpenMP thread cap.
/// Returns the resulting maximum thread count.
int configure_threads_from_env();

int max_threads();

}  // namespace conelab
