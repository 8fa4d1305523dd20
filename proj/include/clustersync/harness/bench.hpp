#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "clustersync/harness/config.hpp"

namespace clustersync::harness {

struct BenchRow {
  int n = 0;
  std::string phase;  // eigen, cpqr, recover, refine, without_eigen, full
  double ms = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double slope_without_eigen = 0.0;
  double slope_full = 0.0;
};

/// Least-squares slope of log(ys) against log(xs).
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Median over `repetitions` of the per-call time of `fn` in ms, after one
/// discarded warm-up call. Fast kernels are looped until a repetition takes
/// at least `min_rep_ms`, and the loop time is divided by the loop count.
double median_time_ms(const std::function<void()>& fn, int repetitions, double min_rep_ms = 20.0);

/// Runtime mode: one instance per n (d = spec.d.front(), p and q from the
/// first alpha, beta or the literal p, q), timed phase by phase. The
/// eigensolve is the median over spec.repetitions runs; the other phases
/// are the minimum over spec.repetitions interleaved rounds.
BenchResult run_runtime_bench(const SweepSpec& spec);

void write_bench_csv(std::ostream& out, const BenchResult& result);

std::string bench_manifest_json(const SweepSpec& spec, const BenchResult& result);

}  // namespace clustersync::harness
