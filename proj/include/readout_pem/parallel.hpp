#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace readout_pem {

/// Worker count from READOUT_PEM_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, count) across worker threads. Each index is
/// processed exactly once; callers write results into per-index slots so the
/// outcome never depends on scheduling. The first exception (lowest index)
/// is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace readout_pem
