// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace modspec {

/// Number of worker threads used by fiberwise loops. Honors the
/// MODSPEC_THREADS environment variable, otherwise hardware concurrency.
unsigned max_threads();

/// Runs fn(i) for i in [0, count). Work is split into contiguous chunks so
/// every invocation writes only to its own slot; callers do any reduction
/// afterwards in fixed index order, which keeps results bit-reproducible
/// regardless of the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace modspec
