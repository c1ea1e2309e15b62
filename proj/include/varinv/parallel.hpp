#pragma once
#include <cstddef>
#include <functional>

namespace varinv {

/// Execution policy for the data-parallel kernels (quadrature node sweeps,
/// flow tabulation, Monte-Carlo membership counting, tester sample loops).
///
/// Every kernel is written two-pass: evaluate into an index-addressed buffer,
/// then reduce in index order.  Serial and Parallel therefore produce
/// bit-identical results; the serial path is kept as the reference the tests
/// compare against, and the bench tool times one against the other.
enum class ExecMode { Serial, Parallel };

/// Process-wide execution mode.  Defaults to Parallel when compiled with
/// OpenMP, Serial otherwise.
ExecMode& exec_mode();

/// True when OpenMP was available at compile time.
bool openmp_enabled();

/// Thread count the Parallel mode will use (1 without OpenMP).
int max_threads();

/// Runs body(0..count-1).  Distribution across threads follows exec_mode();
/// bodies must write only to disjoint slots.  Exceptions must not leak out of
/// the body (callers buffer errors per index and rethrow in index order).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace varinv
