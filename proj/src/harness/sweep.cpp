#include "clustersync/harness/sweep.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "clustersync/errors.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/model.hpp"
#include "clustersync/rng.hpp"

namespace clustersync::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

void add_flag(std::vector<std::string>& flags, const std::string& flag) {
  for (const auto& f : flags)
    if (f == flag) return;
  flags.push_back(flag);
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "mode", "n",     "K",          "d",           "alpha",        "beta",      "p",
      "q",    "sigma", "eta",        "trial",       "subseed",      "exact",     "sync_error_log",
      "snr_min", "t_eigen_ms", "t_cpqr_ms", "t_recover_ms", "t_refine_ms", "flags"};
  return columns;
}

std::uint64_t trial_subseed(std::uint64_t master, const Cell& cell, int trial) {
  std::uint64_t key = derive_key(master, {static_cast<std::uint64_t>(cell.n), static_cast<std::uint64_t>(cell.K),
                                          static_cast<std::uint64_t>(cell.d), bits(cell.p), bits(cell.q),
                                          bits(cell.sigma), static_cast<std::uint64_t>(trial)});
  for (int m : cell.sizes) key = derive_key(key, {static_cast<std::uint64_t>(m)});
  return key;
}

RunRecord run_trial(const SweepSpec& spec, const Cell& cell, int trial) {
  RunRecord rec;
  rec.cell = cell;
  rec.trial = trial;
  rec.subseed = trial_subseed(spec.seed, cell, trial);
  rec.sync_error_log = kNaN;
  rec.snr_min = kNaN;
  try {
    ModelParams params;
    params.n = cell.n;
    params.K = cell.K;
    params.d = cell.d;
    params.p = cell.p;
    params.q = cell.q;
    params.sizes = cell.sizes;
    params.sigma = cell.sigma;
    params.seed = rec.subseed;
    GroundTruth gt = generate_ground_truth(params);
    if (spec.permute_nodes)
      gt = permute_nodes(gt, random_permutation(cell.n, derive_key(rec.subseed, {static_cast<std::uint64_t>(StreamTag::Permutation)})));
    SparseBlockMatrix a = generate_observation(gt, cell.p, cell.q, rec.subseed);
    if (cell.sigma > 0.0) a = add_gaussian_noise(a, cell.sigma, rec.subseed);

    PipelineOptions options;
    options.refine = spec.refine;
    options.refine_fraction = spec.refine_fraction;
    options.solver = spec.solver;
    options.solver.seed = rec.subseed;
    const PipelineResult run = run_pipeline(a, cell.K, options);

    rec.exact = exact_recovery(run.result.labels, gt.labels, cell.K) ? 1.0 : 0.0;
    rec.sync_error_log = sync_error(run.result.transforms, gt);
    if (rec.sync_error_log <= kLogFloor) add_flag(rec.flags, "sync_floor");
    if (cell.K == 2) {
      rec.snr_min = snr_ratio(run.factors, gt.labels, cell.d);
      if (rec.snr_min == kInfiniteRatio) add_flag(rec.flags, "snr_inf");
    }
    if (spec.timings) rec.timings = run.timings;
    if (run.no_convergence) add_flag(rec.flags, "no_convergence");
    if (run.basis.degenerate_gap) add_flag(rec.flags, "degenerate_gap");
    if (run.factors.rank_deficient) add_flag(rec.flags, "rank_deficient");
    if (!run.result.zero_columns.empty()) add_flag(rec.flags, "zero_column");
    if (run.result.empty_cluster) add_flag(rec.flags, "empty_cluster");
    if (run.result.disconnected_cluster) add_flag(rec.flags, "disconnected_cluster");
  } catch (const Error& e) {
    rec.exact = 0.0;
    add_flag(rec.flags, std::string("error=") + to_string(e.kind()));
  } catch (const std::exception&) {
    rec.exact = 0.0;
    add_flag(rec.flags, "error=Internal");
  }
  return rec;
}

RunRecord summarize(const Cell& cell, std::span<const RunRecord> trials) {
  RunRecord s;
  s.cell = cell;
  s.summary = true;
  s.exact = s.sync_error_log = s.snr_min = kNaN;
  if (trials.empty()) return s;
  double exact = 0.0, sync = 0.0, snr = 0.0;
  int sync_count = 0, snr_count = 0, errors = 0;
  bool snr_inf = false;
  PhaseTimings t;
  for (const auto& r : trials) {
    exact += r.exact;
    t.eigen_ms += r.timings.eigen_ms;
    t.cpqr_ms += r.timings.cpqr_ms;
    t.recover_ms += r.timings.recover_ms;
    t.refine_ms += r.timings.refine_ms;
    if (std::isfinite(r.sync_error_log)) {
      sync += r.sync_error_log;
      ++sync_count;
    }
    if (r.snr_min == kInfiniteRatio) {
      snr_inf = true;
    } else if (std::isfinite(r.snr_min)) {
      snr += r.snr_min;
      ++snr_count;
    }
    for (const auto& f : r.flags)
      if (f.rfind("error=", 0) == 0) ++errors;
  }
  const double count = static_cast<double>(trials.size());
  s.exact = exact / count;
  s.timings = {t.eigen_ms / count, t.cpqr_ms / count, t.recover_ms / count, t.refine_ms / count};
  if (sync_count > 0) s.sync_error_log = sync / sync_count;
  if (snr_inf) {
    s.snr_min = kInfiniteRatio;
    add_flag(s.flags, "snr_inf");
  } else if (snr_count > 0) {
    s.snr_min = snr / snr_count;
  }
  if (errors > 0) add_flag(s.flags, "errors=" + std::to_string(errors));
  return s;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.plan = expand_cells(spec);
  const auto& cells = result.plan.cells;
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t jobs = cells.size() * trials;
  result.trials.resize(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++)
      result.trials[job] = run_trial(spec, cells[job / trials], static_cast<int>(job % trials));
  };
  const int workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(jobs)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t c = 0; c < cells.size(); ++c)
    result.summaries.push_back(
        summarize(cells[c], std::span<const RunRecord>(result.trials).subspan(c * trials, trials)));
  return result;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
  const auto& columns = csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  auto row = [&](const RunRecord& r) {
    const Cell& c = r.cell;
    const std::vector<std::string> fields{
        to_string(spec.mode),
        std::to_string(c.n),
        std::to_string(c.K),
        std::to_string(c.d),
        format_double(c.alpha),
        format_double(c.beta),
        format_double(c.p),
        format_double(c.q),
        format_double(c.sigma),
        format_double(c.eta),
        r.summary ? "mean" : std::to_string(r.trial),
        r.summary ? "" : std::to_string(r.subseed),
        r.summary ? format_double(r.exact) : (r.exact > 0.5 ? "1" : "0"),
        format_double(r.sync_error_log),
        format_double(r.snr_min),
        format_double(r.timings.eigen_ms),
        format_double(r.timings.cpqr_ms),
        format_double(r.timings.recover_ms),
        format_double(r.timings.refine_ms),
        join_flags(r.flags),
    };
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_escape(fields[i]);
    out << '\n';
  };
  for (const auto& r : result.trials) row(r);
  for (const auto& r : result.summaries) row(r);
}

std::string manifest_json(const SweepSpec& spec, const SweepResult& result) {
  using nlohmann::json;
  json resolved = {
      {"mode", to_string(spec.mode)},
      {"n", spec.n},
      {"d", spec.d},
      {"K", spec.K},
      {"sizes", spec.sizes},
      {"alpha", spec.alpha},
      {"beta", spec.beta},
      {"p", spec.p ? json(*spec.p) : json(nullptr)},
      {"q", spec.q ? json(*spec.q) : json(nullptr)},
      {"eta", spec.eta},
      {"eta_fixed", spec.eta_fixed == EtaAxis::Alpha ? "alpha" : "beta"},
      {"sigma", spec.sigma},
      {"trials", spec.trials},
      {"refine", to_string(spec.refine)},
      {"refine_fraction", spec.refine_fraction},
      {"permute_nodes", spec.permute_nodes},
      {"workers", spec.workers},
      {"timings", spec.timings},
      {"repetitions", spec.repetitions},
      {"tolerance", spec.solver.tolerance},
      {"max_iterations", spec.solver.max_iterations},
      {"block_size", spec.solver.block_size},
  };
  json manifest = {
      {"schema_version", kCsvSchemaVersion},
      {"columns", csv_columns()},
      {"master_seed", spec.seed},
      {"subseed", "derive_key(master_seed, n, K, d, bits(p), bits(q), bits(sigma), trial, sizes...)"},
      {"sync_error_log_base", "e"},
      {"timing", spec.timings ? "steady_clock per phase, single run per trial, milliseconds"
                              : "disabled; timing columns are zero"},
      {"summary_rows", "trial = mean; exact and timings averaged over all trials, sync_error_log and "
                       "snr_min over finite values"},
      {"spec", resolved},
      {"cells", result.plan.cells.size()},
      {"skipped_cells", result.plan.skipped},
  };
  return manifest.dump(2) + "\n";
}

}  // namespace clustersync::harness
