// clustersync: experiment driver and one-shot solver.
//
//   clustersync sweep --config grid.cfg --out grid.csv
//   clustersync bench --config runtime.cfg --out runtime.csv
//   clustersync snr   --config snr.cfg --out snr.csv
//   clustersync generate --n 400 --K 2 --d 2 --alpha 20 --beta 2 --out a.jsyn --truth gt.jsyn
//   clustersync solve --input a.jsyn --truth gt.jsyn --refine both
//
// Exit status: 0 on success, 1 on validation or parse errors, 2 on I/O errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clustersync/errors.hpp"
#include "clustersync/harness/bench.hpp"
#include "clustersync/harness/config.hpp"
#include "clustersync/harness/sweep.hpp"
#include "clustersync/io.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/model.hpp"
#include "clustersync/pipeline.hpp"

namespace cs = clustersync;
namespace hs = clustersync::harness;

namespace {

struct SweepFlags {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> refine;
  std::optional<int> workers;
  std::string out;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_option("--config", f.config, "Configuration file (key = value lines)");
  cmd->add_option("--set", f.set, "Extra setting key=value, applied after the file")->take_all();
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--trials", f.trials, "Realizations per cell");
  cmd->add_option("--refine", f.refine, "none | clusters | transforms | both");
  cmd->add_option("--workers", f.workers, "Parallel trials");
  cmd->add_option("--out", f.out, "CSV output path (default stdout); the manifest goes next to it");
}

hs::SweepSpec resolve_spec(const SweepFlags& f) {
  hs::SweepSpec spec = f.config.empty() ? hs::SweepSpec{} : hs::load_config(f.config);
  for (const auto& kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw cs::Error(cs::ErrorKind::ParseError, "--set expects key=value, got '" + kv + "'");
    hs::apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1), "--set");
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (f.refine) hs::apply_setting(spec, "refine", *f.refine, "--refine");
  if (f.workers) spec.workers = *f.workers;
  return spec;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cs::Error(cs::ErrorKind::IoError, "cannot write " + path);
  return out;
}

void emit(const std::string& path, const std::string& csv, const std::string& manifest) {
  if (path.empty()) {
    std::cout << csv;
    std::cerr << manifest;
    return;
  }
  open_out(path) << csv;
  open_out(path + ".manifest.json") << manifest;
}

int run_sweep_command(const SweepFlags& f, std::optional<hs::SweepMode> forced) {
  hs::SweepSpec spec = resolve_spec(f);
  if (forced) spec.mode = *forced;
  if (spec.mode == hs::SweepMode::Runtime)
    throw cs::Error(cs::ErrorKind::ValidationError, "runtime mode runs through `clustersync bench`");
  const hs::SweepResult result = hs::run_sweep(spec);
  for (const auto& line : result.plan.skipped) std::cerr << "skipped: " << line << '\n';
  std::ostringstream csv;
  hs::write_csv(csv, spec, result);
  emit(f.out, csv.str(), hs::manifest_json(spec, result));
  return 0;
}

int run_bench_command(const SweepFlags& f) {
  hs::SweepSpec spec = resolve_spec(f);
  spec.mode = hs::SweepMode::Runtime;
  const hs::BenchResult result = hs::run_runtime_bench(spec);
  std::ostringstream csv;
  hs::write_bench_csv(csv, result);
  emit(f.out, csv.str(), hs::bench_manifest_json(spec, result));
  std::cerr << "slope without eigensolve: " << result.slope_without_eigen << '\n'
            << "slope full pipeline:      " << result.slope_full << '\n';
  return 0;
}

struct GenerateFlags {
  int n = 0;
  int K = 2;
  int d = 2;
  std::optional<double> p, q, alpha, beta;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth;
};

int run_generate(const GenerateFlags& f) {
  const double scale = f.n > 1 ? std::log(static_cast<double>(f.n)) / f.n : 0.0;
  if (!f.p && !f.alpha) throw cs::Error(cs::ErrorKind::ValidationError, "give --p or --alpha");
  if (!f.q && !f.beta) throw cs::Error(cs::ErrorKind::ValidationError, "give --q or --beta");
  cs::ModelParams params;
  params.n = f.n;
  params.K = f.K;
  params.d = f.d;
  params.p = f.p ? *f.p : *f.alpha * scale;
  params.q = f.q ? *f.q : *f.beta * scale;
  params.sigma = f.sigma;
  params.seed = f.seed;
  try {
    params.validate();
  } catch (const cs::Error& e) {
    throw cs::Error(cs::ErrorKind::ValidationError, e.what());
  }
  const cs::GroundTruth gt = cs::generate_ground_truth(params);
  cs::SparseBlockMatrix a = cs::generate_observation(gt, params.p, params.q, params.seed);
  if (params.sigma > 0.0) a = cs::add_gaussian_noise(a, params.sigma, params.seed);
  cs::io::save_observation(f.out, a, f.K);
  if (!f.truth.empty()) cs::io::save_ground_truth(f.truth, gt);
  std::cerr << "wrote " << a.block_count() << " blocks, p=" << params.p << " q=" << params.q << '\n';
  return 0;
}

struct SolveFlags {
  std::string input;
  std::string truth;
  std::optional<int> K;
  std::string refine = "none";
  double refine_fraction = 0.10;
  std::uint64_t seed = 0;
  std::string out;
};

int run_solve(const SolveFlags& f) {
  cs::io::Header header;
  const cs::SparseBlockMatrix a = cs::io::load_observation(f.input, &header);
  const int K = f.K ? *f.K : static_cast<int>(header.K);
  cs::PipelineOptions options;
  options.refine = cs::parse_refine_mode(f.refine);
  options.refine_fraction = f.refine_fraction;
  options.solver.seed = f.seed;
  const cs::PipelineResult run = cs::run_pipeline(a, K, options);

  std::ostringstream table;
  const int d = a.d();
  table << "node,label,confidence";
  for (int e = 0; e < d * d; ++e) table << ",o" << e;
  table << '\n';
  for (int i = 0; i < a.n(); ++i) {
    table << i << ',' << run.result.labels[i] << ',' << hs::format_double(run.result.confidence[i]);
    const cs::Matrix& o = run.result.transforms[i];
    for (int e = 0; e < d * d; ++e) table << ',' << hs::format_double(o.data()[e]);
    table << '\n';
  }
  if (f.out.empty()) std::cout << table.str();
  else open_out(f.out) << table.str();

  if (run.no_convergence) std::cerr << "warning: eigensolver did not converge; used best iterate\n";
  if (!f.truth.empty()) {
    const cs::GroundTruth gt = cs::io::load_ground_truth(f.truth);
    if (gt.n != a.n() || gt.d != d)
      throw cs::Error(cs::ErrorKind::ValidationError, "ground truth does not match the observation");
    std::cerr << "exact_recovery: " << (cs::exact_recovery(run.result.labels, gt.labels, K) ? 1 : 0) << '\n'
              << "sync_error_log: " << cs::sync_error(run.result.transforms, gt) << '\n';
  }
  return 0;
}

int exit_code(const cs::Error& e) { return e.kind() == cs::ErrorKind::IoError ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint clustering and synchronization over orthogonal groups"};
  app.require_subcommand(1);

  SweepFlags sweep_flags, bench_flags, snr_flags;
  auto* sweep = app.add_subcommand("sweep", "Run a grid, eta-sweep or noise-grid configuration");
  add_sweep_flags(sweep, sweep_flags);
  auto* bench = app.add_subcommand("bench", "Runtime scaling over n with log-log slopes");
  add_sweep_flags(bench, bench_flags);
  auto* snr = app.add_subcommand("snr", "Signal-to-noise ratio of the R factor versus d");
  add_sweep_flags(snr, snr_flags);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a random instance");
  generate->add_option("--n", gen.n, "Nodes")->required();
  generate->add_option("--K", gen.K, "Clusters");
  generate->add_option("--d", gen.d, "Block dimension");
  generate->add_option("--p", gen.p, "Within-cluster edge probability");
  generate->add_option("--q", gen.q, "Cross-cluster edge probability");
  generate->add_option("--alpha", gen.alpha, "p = alpha log n / n");
  generate->add_option("--beta", gen.beta, "q = beta log n / n");
  generate->add_option("--sigma", gen.sigma, "Additive Gaussian noise level");
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("--out", gen.out, "Observation file")->required();
  generate->add_option("--truth", gen.truth, "Ground-truth file");

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Run the pipeline on a stored instance");
  solve->add_option("--input", solve_flags.input, "Observation file")->required();
  solve->add_option("--truth", solve_flags.truth, "Ground truth to score against");
  solve->add_option("--K", solve_flags.K, "Clusters (default: from the file header)");
  solve->add_option("--refine", solve_flags.refine, "none | clusters | transforms | both");
  solve->add_option("--refine-fraction", solve_flags.refine_fraction, "Share of nodes re-clustered");
  solve->add_option("--seed", solve_flags.seed, "Eigensolver seed");
  solve->add_option("--out", solve_flags.out, "Labels and transforms CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*sweep) return run_sweep_command(sweep_flags, std::nullopt);
    if (*bench) return run_bench_command(bench_flags);
    if (*snr) return run_sweep_command(snr_flags, hs::SweepMode::Snr);
    if (*generate) return run_generate(gen);
    if (*solve) return run_solve(solve_flags);
  } catch (const cs::Error& e) {
    std::cerr << "clustersync: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "clustersync: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
