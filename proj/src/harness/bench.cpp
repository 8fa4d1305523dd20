#include "clustersync/harness/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "clustersync/errors.hpp"
#include "clustersync/harness/sweep.hpp"
#include "clustersync/model.hpp"
#include "clustersync/pipeline.hpp"
#include "clustersync/rng.hpp"

namespace clustersync::harness {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorKind::InvalidParams, "slope fit needs at least two matching points");
  double mx = 0.0, my = 0.0;
  const double count = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error(ErrorKind::DomainError, "slope fit needs positive values");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(ErrorKind::DomainError, "slope fit needs distinct x values");
  return sxy / sxx;
}

double median_time_ms(const std::function<void()>& fn, int repetitions, double min_rep_ms) {
  auto start = Clock::now();
  fn();
  const double warm = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  long loops = 1;
  if (warm > 0.0 && warm < min_rep_ms) loops = static_cast<long>(std::ceil(min_rep_ms / warm));
  std::vector<double> samples;
  for (int r = 0; r < std::max(1, repetitions); ++r) {
    start = Clock::now();
    for (long l = 0; l < loops; ++l) fn();
    samples.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count() / loops);
  }
  return median(std::move(samples));
}

namespace {

struct Kernel {
  std::size_t size_index;
  std::string phase;
  std::function<void()> fn;
  long loops = 1;
  std::vector<double> samples = {};
};

struct Instance {
  int n = 0;
  double eigen_ms = 0.0;
  Matrix phi_t;
  BlockCpqrFactors factors;
  RecoveryResult recovery;
};

long calibrate_loops(const std::function<void()>& fn, double min_rep_ms) {
  const auto start = Clock::now();
  fn();
  const double warm = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (warm > 0.0 && warm < min_rep_ms) return static_cast<long>(std::ceil(min_rep_ms / warm));
  return 1;
}

}  // namespace

BenchResult run_runtime_bench(const SweepSpec& spec) {
  if (spec.n.size() < 2) throw Error(ErrorKind::ValidationError, "runtime mode needs at least two n values");
  if (spec.d.empty()) throw Error(ErrorKind::ValidationError, "d is required");
  if (!spec.p && spec.alpha.empty()) throw Error(ErrorKind::ValidationError, "alpha or p is required");
  if (!spec.q && spec.beta.empty()) throw Error(ErrorKind::ValidationError, "beta or q is required");
  const int d = spec.d.front();
  const bool refine = spec.refine == RefineMode::Clusters || spec.refine == RefineMode::Both;

  std::vector<Instance> instances(spec.n.size());
  for (std::size_t s = 0; s < spec.n.size(); ++s) {
    const int n = spec.n[s];
    const double scale = std::log(static_cast<double>(n)) / n;
    const double p = spec.p ? *spec.p : spec.alpha.front() * scale;
    const double q = spec.q ? *spec.q : spec.beta.front() * scale;
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
      throw Error(ErrorKind::ValidationError, "runtime cell n=" + std::to_string(n) + " has p or q outside [0, 1]");

    ModelParams params;
    params.n = n;
    params.K = spec.K;
    params.d = d;
    params.p = p;
    params.q = q;
    params.seed = derive_key(spec.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d)});
    const GroundTruth gt = generate_ground_truth(params);
    SparseBlockMatrix a = generate_observation(gt, p, q, params.seed);
    if (spec.sigma.front() > 0.0) a = add_gaussian_noise(a, spec.sigma.front(), params.seed);

    SolverConfig solver = spec.solver;
    solver.seed = params.seed;
    EigenBasis basis;
    Instance& inst = instances[s];
    inst.n = n;
    inst.eigen_ms = median_time_ms([&] {
      try {
        basis = top_eigenpairs(a, spec.K * d, solver);
      } catch (const NoConvergence& e) {
        basis = e.best();
      }
    }, spec.repetitions, 0.0);
    inst.phi_t = basis.vectors.transpose();
    inst.factors = blockwise_cpqr(inst.phi_t, d);
    inst.recovery = assign_and_extract(inst.factors, spec.K, d);
  }

  // The short phases are measured round-robin over all sizes so that slow
  // stretches of the host spread over every n instead of one.
  std::vector<Kernel> kernels;
  for (std::size_t s = 0; s < instances.size(); ++s) {
    Instance& inst = instances[s];
    kernels.push_back({s, "cpqr", [&inst, d] { (void)blockwise_cpqr(inst.phi_t, d); }});
    kernels.push_back({s, "recover", [&inst, &spec, d] { (void)assign_and_extract(inst.factors, spec.K, d); }});
    if (refine)
      kernels.push_back({s, "refine", [&inst, &spec] {
                           (void)refine_clusters(inst.factors, inst.recovery, spec.refine_fraction);
                         }});
    kernels.push_back({s, "without_eigen", [&inst, &spec, d, refine] {
                         const BlockCpqrFactors f = blockwise_cpqr(inst.phi_t, d);
                         const RecoveryResult r = assign_and_extract(f, spec.K, d);
                         if (refine) (void)refine_clusters(f, r, spec.refine_fraction);
                       }});
  }
  for (auto& k : kernels) k.loops = calibrate_loops(k.fn, 5.0);
  for (int r = 0; r < std::max(1, spec.repetitions); ++r) {
    for (auto& k : kernels) {
      const auto start = Clock::now();
      for (long l = 0; l < k.loops; ++l) k.fn();
      k.samples.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count() / k.loops);
    }
  }

  BenchResult out;
  std::vector<double> ns, without, full;
  for (std::size_t s = 0; s < instances.size(); ++s) {
    out.rows.push_back({instances[s].n, "eigen", instances[s].eigen_ms});
    double rest = 0.0;
    for (const auto& k : kernels) {
      if (k.size_index != s) continue;
      const double best = *std::min_element(k.samples.begin(), k.samples.end());
      out.rows.push_back({instances[s].n, k.phase, best});
      if (k.phase == "without_eigen") rest = best;
    }
    out.rows.push_back({instances[s].n, "full", instances[s].eigen_ms + rest});
    ns.push_back(instances[s].n);
    without.push_back(rest);
    full.push_back(instances[s].eigen_ms + rest);
  }
  out.slope_without_eigen = fit_loglog_slope(ns, without);
  out.slope_full = fit_loglog_slope(ns, full);
  return out;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << "n,phase,ms\n";
  for (const auto& r : result.rows) out << r.n << ',' << r.phase << ',' << format_double(r.ms) << '\n';
}

std::string bench_manifest_json(const SweepSpec& spec, const BenchResult& result) {
  nlohmann::json manifest = {
      {"mode", "runtime"},
      {"columns", {"n", "phase", "ms"}},
      {"master_seed", spec.seed},
      {"n", spec.n},
      {"d", spec.d.front()},
      {"K", spec.K},
      {"alpha", spec.alpha},
      {"beta", spec.beta},
      {"repetitions", spec.repetitions},
      {"timing", "steady_clock; one discarded warm-up call; median of repetitions; calls shorter than "
                 "20 ms are looped and divided by the loop count"},
      {"slope_without_eigen", result.slope_without_eigen},
      {"slope_full", result.slope_full},
  };
  return manifest.dump(2) + "\n";
}

}  // namespace clustersync::harness
