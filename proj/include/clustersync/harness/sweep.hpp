#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clustersync/harness/config.hpp"
#include "clustersync/pipeline.hpp"

namespace clustersync::harness {

inline constexpr int kCsvSchemaVersion = 1;

const std::vector<std::string>& csv_columns();

/// One CSV row. Summary rows have `summary` set and hold per-cell means;
/// NaN metrics are written as empty fields.
struct RunRecord {
  Cell cell;
  int trial = 0;
  bool summary = false;
  std::uint64_t subseed = 0;
  double exact = 0.0;
  double sync_error_log = 0.0;
  double snr_min = 0.0;
  PhaseTimings timings;
  std::vector<std::string> flags;
};

struct SweepResult {
  CellPlan plan;
  std::vector<RunRecord> trials;     // ordered by (cell, trial)
  std::vector<RunRecord> summaries;  // one per cell
};

/// Sub-seed from the master seed, the cell coordinates and the trial index.
/// The refinement mode is left out so refined and unrefined sweeps see the
/// same instances.
std::uint64_t trial_subseed(std::uint64_t master, const Cell& cell, int trial);

/// Runs one realization. Failures become flags, never exceptions.
RunRecord run_trial(const SweepSpec& spec, const Cell& cell, int trial);

/// Mean over trial rows: exact and timings over all rows, sync error and SNR
/// over rows where they are finite. An infinite SNR in any row makes the
/// summary SNR the sentinel too.
RunRecord summarize(const Cell& cell, std::span<const RunRecord> trials);

/// Validates `spec`, then runs every (cell, trial) on `spec.workers`
/// threads. The result does not depend on the worker count.
SweepResult run_sweep(const SweepSpec& spec);

/// RFC-4180 quoting: fields containing a comma, quote or line break are
/// quoted, with embedded quotes doubled.
std::string csv_escape(std::string_view field);

/// Shortest decimal that round-trips; empty for NaN.
std::string format_double(double value);

void write_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result);

/// JSON manifest: schema version, columns, resolved spec, master seed, log
/// base and timing methodology, skipped cells.
std::string manifest_json(const SweepSpec& spec, const SweepResult& result);

}  // namespace clustersync::harness
