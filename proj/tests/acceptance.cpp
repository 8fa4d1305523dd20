// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance          run every criterion
//   acceptance 3 9      run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clustersync/cpqr.hpp"
#include "clustersync/eigensolver.hpp"
#include "clustersync/harness/bench.hpp"
#include "clustersync/harness/config.hpp"
#include "clustersync/harness/sweep.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/pipeline.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace clustersync;
using namespace clustersync::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // wall-clock limit, 0 for none
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::vector<const RunRecord*> summaries(const SweepResult& result) {
  std::vector<const RunRecord*> out;
  for (const auto& r : result.summaries) out.push_back(&r);
  return out;
}

// Adjacent decreases in a sequence that should be non-decreasing.
int inversions(const std::vector<double>& xs) {
  int count = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] < xs[i - 1] - 1e-12) ++count;
  return count;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) out += (out.empty() ? "" : " ") + fmt("%.3g", x);
  return out;
}

// ------------------------------------------------------------------ 1

Outcome clean_exactness() {
  const SweepSpec spec = parse_config(
      "mode = grid\nn = 200\nK = 2\nd = 2, 3\np = 1\nq = 0\ntrials = 20\nseed = 101\ntimings = off\n");
  spec.validate();
  const SweepResult result = run_sweep(spec);
  int exact = 0;
  double worst = kLogFloor;
  for (const auto& r : result.trials) {
    if (r.exact == 1.0) ++exact;
    worst = std::max(worst, r.sync_error_log);
  }
  const int total = static_cast<int>(result.trials.size());
  Outcome o;
  o.pass = total == 40 && exact == total && worst <= std::log(1e-6);
  o.detail = std::to_string(exact) + "/" + std::to_string(total) + " exact, worst aligned error " +
             fmt("%.2e", std::exp(worst));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome eta_threshold() {
  const SweepSpec spec = parse_config(
      "mode = eta-sweep\nn = 400\nK = 2\nd = 2\nalpha = 3, 10, 20, 30, 45, 60\n"
      "eta = 0.1, 0.3, 0.5, 1.0, 1.5\ntrials = 20\nseed = 102\ntimings = off\n");
  spec.validate();
  const SweepResult result = run_sweep(spec);
  std::map<double, std::vector<double>> by_eta;
  for (const auto* s : summaries(result)) by_eta[s->cell.eta].push_back(s->exact);
  Outcome o;
  o.pass = true;
  for (double target : {0.1, 0.3, 0.5, 1.0, 1.5}) {
    const auto it = std::find_if(by_eta.begin(), by_eta.end(),
                                 [&](const auto& kv) { return std::abs(kv.first - target) < 1e-9; });
    if (it == by_eta.end()) {
      o.pass = false;
      o.detail += "eta=" + fmt("%g", target) + ": no reachable cell; ";
      continue;
    }
    double mean = 0.0;
    for (double v : it->second) mean += v;
    mean /= static_cast<double>(it->second.size());
    if (target <= 0.3 && mean < 0.9) o.pass = false;
    if (target >= 1.5 && mean > 0.1) o.pass = false;
    o.detail += "eta=" + fmt("%g", target) + ": " + fmt("%.2f", mean) + " over " +
                std::to_string(it->second.size()) + " cells; ";
  }
  return o;
}

// ------------------------------------------------------------------ 3

Outcome phase_monotonicity() {
  const SweepSpec spec = parse_config(
      "mode = grid\nn = 400\nK = 2\nd = 2\nalpha = 0:40:9\nbeta = 0:16:9\ntrials = 20\nseed = 103\n"
      "timings = off\n");
  spec.validate();
  const SweepResult result = run_sweep(spec);
  std::map<double, std::vector<double>> by_alpha, by_beta;
  for (const auto* s : summaries(result)) {
    by_alpha[s->cell.alpha].push_back(s->exact);
    by_beta[s->cell.beta].push_back(s->exact);
  }
  auto marginal = [](const std::map<double, std::vector<double>>& m) {
    std::vector<double> out;
    for (const auto& [key, values] : m) {
      double sum = 0.0;
      for (double v : values) sum += v;
      out.push_back(sum / static_cast<double>(values.size()));
    }
    return out;
  };
  const std::vector<double> alpha_marginal = marginal(by_alpha);
  std::vector<double> beta_marginal = marginal(by_beta);
  std::vector<double> beta_reversed(beta_marginal.rbegin(), beta_marginal.rend());
  const int inv_alpha = inversions(alpha_marginal);
  const int inv_beta = inversions(beta_reversed);
  Outcome o;
  o.pass = inv_alpha <= 1 && inv_beta <= 1;
  o.detail = "alpha marginal [" + join(alpha_marginal) + "] (" + std::to_string(inv_alpha) +
             " inversions), beta marginal [" + join(beta_marginal) + "] (" + std::to_string(inv_beta) +
             " inversions)";
  return o;
}

// ------------------------------------------------------------------ 4

Outcome refinement_improvement() {
  SweepSpec spec = parse_config(
      "mode = grid\nn = 400\nK = 2\nd = 2\nalpha = 3:8:6\nbeta = 1:8:8\ntrials = 20\nseed = 104\n"
      "timings = off\n");
  spec.validate();
  auto mean_success = [](const SweepResult& result) {
    double sum = 0.0;
    for (const auto& s : result.summaries) sum += s.exact;
    return sum / static_cast<double>(result.summaries.size());
  };
  const SweepResult plain = run_sweep(spec);
  spec.refine = RefineMode::Clusters;
  const SweepResult refined = run_sweep(spec);
  const double before = mean_success(plain), after = mean_success(refined);
  double worst_cell = 0.0;
  for (std::size_t c = 0; c < plain.summaries.size(); ++c)
    worst_cell = std::min(worst_cell, refined.summaries[c].exact - plain.summaries[c].exact);
  Outcome o;
  o.pass = after >= before;
  o.detail = "mean success " + fmt("%.4f", before) + " without, " + fmt("%.4f", after) + " with, over " +
             std::to_string(plain.summaries.size()) + " cells; worst cell change " + fmt("%+.2f", worst_cell);
  return o;
}

// ------------------------------------------------------------------ 5

Outcome transform_refinement() {
  const int n = 400, d = 2;
  const double scale = std::log(double(n)) / n;
  int qualifying = 0, within = 0;
  double worst = kLogFloor;
  for (int seed = 0; seed < 20; ++seed) {
    const auto inst = oracle::make_instance(n, 2, d, 8 * scale, 2 * scale, 5000 + seed);
    PipelineOptions opt;
    opt.solver.seed = static_cast<std::uint64_t>(seed);
    opt.refine = RefineMode::Transforms;
    const PipelineResult run = run_pipeline(inst.a, 2, opt);
    if (run.result.disconnected_cluster || !exact_recovery(run.initial.labels, inst.gt.labels, 2)) continue;
    ++qualifying;
    const double err = sync_error(run.result.transforms, inst.gt);
    worst = std::max(worst, err);
    if (err <= std::log(1e-6)) ++within;
  }
  Outcome o;
  o.pass = qualifying >= 10 && within == qualifying;
  o.detail = std::to_string(within) + "/" + std::to_string(qualifying) +
             " qualifying trials at or below 1e-6, worst " + fmt("%.2e", std::exp(worst));
  return o;
}

// ------------------------------------------------------------------ 6

Outcome eigensolver_oracle() {
  Rng rng(106);
  double worst_value = 0.0, worst_projector = 0.0;
  int failures = 0;
  for (int c = 0; c < 50; ++c) {
    const int K = 1 + static_cast<int>(rng() % 3);
    const int d = 1 + static_cast<int>(rng() % 3);
    const int max_n = 200 / d;
    const int n = std::max(2 * K, static_cast<int>(max_n / 3 + rng() % (max_n - max_n / 3 + 1)));
    const double p = 0.3 + 0.7 * rng.uniform();
    const double q = 0.3 * rng.uniform();
    const double sigma = c % 4 == 0 ? 0.5 : 0.0;
    const auto inst = oracle::make_instance(n, K, d, p, q, 6000 + c, sigma);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(c);
    const EigenBasis basis = top_eigenpairs(inst.a, K * d, cfg);
    const auto dense = oracle::dense_top(oracle::materialize(inst.a), K * d);
    const double value_err = (basis.values - dense.values).cwiseAbs().maxCoeff();
    const double proj_err = oracle::projector_distance(basis.vectors, dense.vectors);
    worst_value = std::max(worst_value, value_err);
    worst_projector = std::max(worst_projector, proj_err);
    if (value_err > 1e-6 || proj_err > 1e-6) ++failures;
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(50 - failures) + "/50 within 1e-6; worst eigenvalue error " +
             fmt("%.2e", worst_value) + ", worst projector distance " + fmt("%.2e", worst_projector);
  return o;
}

// ------------------------------------------------------------------ 7

Matrix kron_permutation(const std::vector<int>& perm, int d) {
  const int n = static_cast<int>(perm.size());
  Matrix pi = Matrix::Zero(n, n);
  for (int t = 0; t < n; ++t) pi(perm[t], t) = 1.0;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n) * d, static_cast<Eigen::Index>(n) * d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (pi(a, b) != 0.0) out.block(a * d, b * d, d, d) = Matrix::Identity(d, d);
  return out;
}

Outcome cpqr_oracle() {
  Rng rng(107);
  int pivot_mismatch = 0, scalar_recon = 0;
  double worst_scalar = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int K = 1 + static_cast<int>(rng() % 6);
    const int n = K + static_cast<int>(rng() % 40);
    Matrix x(K, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const BlockCpqrFactors f = blockwise_cpqr(x, 1);
    const auto gb = oracle::golub_businger(x, K);
    if (f.pivots != gb.pivots) ++pivot_mismatch;
    const double err = (x - f.q * f.r).norm();
    worst_scalar = std::max(worst_scalar, err);
    if (err > 1e-10) ++scalar_recon;
  }

  int block_failures = 0;
  double worst_block = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int d = 2 + static_cast<int>(rng() % 3);
    const int K = 1 + static_cast<int>(rng() % 4);
    const int n = K + static_cast<int>(rng() % 30);
    Matrix x(K * d, n * d);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const BlockCpqrFactors f = blockwise_cpqr(x, d);
    const double err = (x - f.q * f.r).norm();
    worst_block = std::max(worst_block, err);
    std::vector<int> sorted = f.perm;
    std::sort(sorted.begin(), sorted.end());
    bool ok = err <= 1e-8 && static_cast<int>(sorted.size()) == n;
    for (int t = 0; ok && t < n; ++t) ok = sorted[t] == t;
    if (ok) {
      // X (Pi kron I_d) = Q R_pivoted with R_pivoted upper triangular.
      const Matrix big = kron_permutation(f.perm, d);
      const Matrix xp = x * big;
      ok = (xp - apply_block_permutation(x, f.perm, d)).norm() == 0.0;
      const Matrix rp = f.r * big;
      ok = ok && (xp - f.q * rp).norm() <= 1e-8;
      for (int j = 0; ok && j < K * d; ++j)
        for (int i = j + 1; i < K * d; ++i) ok = ok && std::abs(rp(i, j)) <= 1e-12;
      ok = ok && (apply_inverse_block_permutation(xp, f.perm, d) - x).norm() == 0.0;
    }
    if (!ok) ++block_failures;
  }
  Outcome o;
  o.pass = pivot_mismatch == 0 && scalar_recon == 0 && block_failures == 0;
  o.detail = "d=1: " + std::to_string(100 - pivot_mismatch) + "/100 pivot orders match, worst reconstruction " +
             fmt("%.2e", worst_scalar) + "; d>=2: " + std::to_string(100 - block_failures) +
             "/100 pass, worst reconstruction " + fmt("%.2e", worst_block);
  return o;
}

// ------------------------------------------------------------------ 8

Outcome runtime_slope() {
  const SweepSpec spec =
      parse_config("mode = runtime\nn = 200, 400, 800, 1600\nK = 2\nd = 2\nalpha = 10\nbeta = 10\nseed = 108\nrepetitions = 20\n");
  spec.validate();
  const BenchResult bench = run_runtime_bench(spec);
  std::string times;
  for (const auto& row : bench.rows)
    if (row.phase == "without_eigen") times += (times.empty() ? "" : " ") + fmt("%.3g", row.ms);
  Outcome o;
  o.pass = bench.slope_without_eigen >= 0.8 && bench.slope_without_eigen <= 1.3;
  o.detail = "slope " + fmt("%.3f", bench.slope_without_eigen) + " (ms: " + times + "), with eigensolve " +
             fmt("%.3f", bench.slope_full);
  return o;
}

// ------------------------------------------------------------------ 9

Outcome snr_vs_d() {
  const SweepSpec spec = parse_config(
      "mode = snr\nn = 400\nK = 2\nd = 2, 10, 20\np = 0.5\nq = 0.5\ntrials = 20\nseed = 109\ntimings = off\n");
  spec.validate();
  const SweepResult result = run_sweep(spec);
  std::vector<double> means;
  for (const auto* s : summaries(result)) means.push_back(s->snr_min);
  bool increasing = means.size() == 3;
  for (std::size_t i = 1; increasing && i < means.size(); ++i) increasing = means[i] > means[i - 1];
  Outcome o;
  o.pass = increasing;
  o.detail = "mean min-ratio for d = 2, 10, 20: " + join(means);
  return o;
}

// ------------------------------------------------------------------ 10

Outcome noise_robustness() {
  const SweepSpec spec = parse_config(
      "mode = noise-grid\nn = 400\nK = 2\nd = 2\nalpha = 40\nbeta = 2\nsigma = 0.5, 2.5\ntrials = 20\n"
      "seed = 110\ntimings = off\n");
  spec.validate();
  const SweepResult result = run_sweep(spec);
  double low = -1.0, high = -1.0;
  for (const auto* s : summaries(result)) (s->cell.sigma == 0.5 ? low : high) = s->exact;
  Outcome o;
  o.pass = low >= 0.9 && high >= 0.0 && high <= 0.1;
  o.detail = "success " + fmt("%.2f", low) + " at sigma=0.5, " + fmt("%.2f", high) + " at sigma=2.5 (p=" +
             fmt("%.3f", result.summaries.front().cell.p) + ", q=" + fmt("%.4f", result.summaries.front().cell.q) +
             ")";
  return o;
}

// ------------------------------------------------------------------ 11

Outcome property_suites() {
  const auto reports = properties::run_all(200);
  Outcome o;
  o.pass = !reports.empty();
  int passed = 0;
  for (const auto& r : reports) {
    if (r.ok(200)) {
      ++passed;
    } else {
      o.pass = false;
      o.detail += r.name + " failed " + std::to_string(r.failures) + "/" + std::to_string(r.cases) + " (" +
                  r.first_failure + "); ";
    }
  }
  o.detail += std::to_string(passed) + "/" + std::to_string(reports.size()) + " suites, 200 cases each";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "clean-case exactness", 10, clean_exactness},
      {2, "eta threshold", 300, eta_threshold},
      {3, "phase-transition monotonicity", 600, phase_monotonicity},
      {4, "cluster refinement improvement", 600, refinement_improvement},
      {5, "transform refinement exactness", 0, transform_refinement},
      {6, "eigensolver vs dense oracle", 0, eigensolver_oracle},
      {7, "CPQR vs scalar oracle", 0, cpqr_oracle},
      {8, "runtime slope without eigensolve", 900, runtime_slope},
      {9, "SNR increasing in d", 0, snr_vs_d},
      {10, "additive-noise robustness", 0, noise_robustness},
      {11, "property suites", 0, property_suites},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%g", c.budget_s) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
