#pragma once

// Sweep configuration: a flat `key = value` text file, `#` starts a comment.
//
// Axis keys take either a comma list (`alpha = 2, 4, 8`) or an inclusive
// range `lo:hi:steps` (`alpha = 0:20:11`). The sweep visits the cartesian
// product n x d x sigma x alpha x beta; in eta-sweep mode the non-fixed axis
// is replaced by the `eta` targets.
//
//   mode            grid | eta-sweep | runtime | snr | noise-grid   (grid)
//   n, d            axis of node counts / block dimensions           (required)
//   K               number of clusters                                (2)
//   sizes           cluster sizes, single-n sweeps only               (equal split)
//   alpha, beta     p = alpha log n / n, q = beta log n / n
//   p, q            literal probabilities; override alpha / beta
//   eta             eta targets (eta-sweep)
//   eta_fixed       alpha | beta: the axis held fixed in eta-sweep    (alpha)
//   sigma           additive Gaussian noise levels                    (0)
//   trials          realizations per cell                             (20)
//   refine          none | clusters | transforms | both               (none)
//   refine_fraction share of nodes re-clustered                       (0.10)
//   permute_nodes   shuffle node order before observing               (false)
//   seed            master seed                                       (1)
//   workers         parallel trials                                   (1)
//   timings         on | off; off writes zero timings                 (on)
//   repetitions     timed repetitions per n in runtime mode           (5)
//   tolerance, max_iterations, block_size   eigensolver settings

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clustersync/eigensolver.hpp"
#include "clustersync/pipeline.hpp"

namespace clustersync::harness {

enum class SweepMode { Grid, EtaSweep, Runtime, Snr, NoiseGrid };
enum class EtaAxis { Alpha, Beta };

const char* to_string(SweepMode mode);

struct SweepSpec {
  SweepMode mode = SweepMode::Grid;
  std::vector<int> n;
  std::vector<int> d;
  int K = 2;
  std::vector<int> sizes;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::optional<double> p;
  std::optional<double> q;
  std::vector<double> eta;
  EtaAxis eta_fixed = EtaAxis::Alpha;
  std::vector<double> sigma{0.0};
  int trials = 20;
  RefineMode refine = RefineMode::None;
  double refine_fraction = 0.10;
  bool permute_nodes = false;
  std::uint64_t seed = 1;
  int workers = 1;
  bool timings = true;
  int repetitions = 5;
  SolverConfig solver;

  /// Throws ValidationError naming the violated invariant (including any
  /// grid cell whose p or q leaves [0, 1]).
  void validate() const;
};

/// One sweep coordinate; alpha and beta are reported for literal p, q too.
struct Cell {
  int n = 0;
  int K = 0;
  int d = 0;
  std::vector<int> sizes;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  double eta = 0.0;  // NaN when p == 0
};

struct CellPlan {
  std::vector<Cell> cells;
  /// eta-sweep targets unreachable with the fixed axis value, one line each.
  std::vector<std::string> skipped;
};

/// Enumerates the sweep cells in output order. Throws ValidationError when a
/// grid cell has p or q outside [0, 1].
CellPlan expand_cells(const SweepSpec& spec);

/// Applies one `key = value` setting. Throws ParseError for unknown keys or
/// malformed values; `where` prefixes the message (e.g. "file:12").
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value,
                   const std::string& where);

/// Parses configuration text without validating it.
SweepSpec parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a file. Throws IoError when it cannot be read.
SweepSpec load_config(const std::filesystem::path& path);

}  // namespace clustersync::harness
