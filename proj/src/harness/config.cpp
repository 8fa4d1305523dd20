#include "clustersync/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "clustersync/errors.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/model.hpp"

namespace clustersync::harness {

const char* to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::Grid: return "grid";
    case SweepMode::EtaSweep: return "eta-sweep";
    case SweepMode::Runtime: return "runtime";
    case SweepMode::Snr: return "snr";
    case SweepMode::NoiseGrid: return "noise-grid";
  }
  return "grid";
}

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

[[noreturn]] void validation_error(const std::string& what) {
  throw Error(ErrorKind::ValidationError, what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_number(std::string_view text, const std::string& where, std::string_view key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    parse_error(where, "invalid number '" + std::string(text) + "' for " + std::string(key));
  return value;
}

std::vector<double> parse_axis(std::string_view value, const std::string& where, std::string_view key) {
  if (value.find(':') != std::string_view::npos) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) parse_error(where, std::string(key) + ": range must be lo:hi:steps");
    const double lo = parse_number<double>(parts[0], where, key);
    const double hi = parse_number<double>(parts[1], where, key);
    const int steps = parse_number<int>(parts[2], where, key);
    if (steps < 1) parse_error(where, std::string(key) + ": range needs steps >= 1");
    std::vector<double> out;
    for (int s = 0; s < steps; ++s)
      out.push_back(steps == 1 ? lo : lo + (hi - lo) * s / (steps - 1));
    return out;
  }
  std::vector<double> out;
  for (auto part : split(value, ',')) out.push_back(parse_number<double>(part, where, key));
  return out;
}

std::vector<int> parse_int_axis(std::string_view value, const std::string& where, std::string_view key) {
  std::vector<int> out;
  for (double v : parse_axis(value, where, key)) {
    const double r = std::round(v);
    if (std::abs(r - v) > 1e-9 || std::abs(r) > std::numeric_limits<int>::max())
      parse_error(where, std::string(key) + " expects integers");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

bool parse_bool(std::string_view value, const std::string& where, std::string_view key) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  parse_error(where, std::string(key) + " expects true/false");
}

double log_scale(int n) { return std::log(static_cast<double>(n)) / n; }

}  // namespace

void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value, const std::string& where) {
  value = trim(value);
  if (value.empty()) parse_error(where, "missing value for " + std::string(key));
  if (key == "mode") {
    if (value == "grid") spec.mode = SweepMode::Grid;
    else if (value == "eta-sweep") spec.mode = SweepMode::EtaSweep;
    else if (value == "runtime") spec.mode = SweepMode::Runtime;
    else if (value == "snr") spec.mode = SweepMode::Snr;
    else if (value == "noise-grid") spec.mode = SweepMode::NoiseGrid;
    else parse_error(where, "unknown mode '" + std::string(value) + "'");
  } else if (key == "n") {
    spec.n = parse_int_axis(value, where, key);
  } else if (key == "d") {
    spec.d = parse_int_axis(value, where, key);
  } else if (key == "K") {
    spec.K = parse_number<int>(value, where, key);
  } else if (key == "sizes") {
    spec.sizes = parse_int_axis(value, where, key);
  } else if (key == "alpha") {
    spec.alpha = parse_axis(value, where, key);
  } else if (key == "beta") {
    spec.beta = parse_axis(value, where, key);
  } else if (key == "p") {
    spec.p = parse_number<double>(value, where, key);
  } else if (key == "q") {
    spec.q = parse_number<double>(value, where, key);
  } else if (key == "eta") {
    spec.eta = parse_axis(value, where, key);
  } else if (key == "eta_fixed") {
    if (value == "alpha") spec.eta_fixed = EtaAxis::Alpha;
    else if (value == "beta") spec.eta_fixed = EtaAxis::Beta;
    else parse_error(where, "eta_fixed must be alpha or beta");
  } else if (key == "sigma") {
    spec.sigma = parse_axis(value, where, key);
  } else if (key == "trials") {
    spec.trials = parse_number<int>(value, where, key);
  } else if (key == "refine") {
    try {
      spec.refine = parse_refine_mode(std::string(value));
    } catch (const Error& e) {
      parse_error(where, e.what());
    }
  } else if (key == "refine_fraction") {
    spec.refine_fraction = parse_number<double>(value, where, key);
  } else if (key == "permute_nodes") {
    spec.permute_nodes = parse_bool(value, where, key);
  } else if (key == "seed") {
    spec.seed = parse_number<std::uint64_t>(value, where, key);
  } else if (key == "workers") {
    spec.workers = parse_number<int>(value, where, key);
  } else if (key == "timings") {
    spec.timings = parse_bool(value, where, key);
  } else if (key == "repetitions") {
    spec.repetitions = parse_number<int>(value, where, key);
  } else if (key == "tolerance") {
    spec.solver.tolerance = parse_number<double>(value, where, key);
  } else if (key == "max_iterations") {
    spec.solver.max_iterations = parse_number<int>(value, where, key);
  } else if (key == "block_size") {
    spec.solver.block_size = parse_number<int>(value, where, key);
  } else {
    parse_error(where, "unknown key '" + std::string(key) + "'");
  }
}

SweepSpec parse_config(std::string_view text, const std::string& source) {
  SweepSpec spec;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(where, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) parse_error(where, "empty key");
    apply_setting(spec, key, line.substr(eq + 1), where);
  }
  return spec;
}

SweepSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

CellPlan expand_cells(const SweepSpec& spec) {
  CellPlan plan;
  const bool eta_mode = spec.mode == SweepMode::EtaSweep;
  for (int n : spec.n) {
    for (int d : spec.d) {
      for (double sigma : spec.sigma) {
        Cell base;
        base.n = n;
        base.K = spec.K;
        base.d = d;
        base.sigma = sigma;
        base.sizes = spec.sizes.empty() ? equal_sizes(n, spec.K) : spec.sizes;
        const double scale = log_scale(n);

        auto finish = [&](Cell cell) {
          if (!(cell.p >= 0.0 && cell.p <= 1.0) || !(cell.q >= 0.0 && cell.q <= 1.0)) {
            std::ostringstream msg;
            msg << "cell n=" << n << " alpha=" << cell.alpha << " beta=" << cell.beta
                << " gives p=" << cell.p << ", q=" << cell.q << " outside [0, 1]";
            validation_error(msg.str());
          }
          cell.eta = cell.p > 0.0 ? eta(n, cell.p, cell.q, d) : std::numeric_limits<double>::quiet_NaN();
          plan.cells.push_back(std::move(cell));
        };

        if (eta_mode) {
          const bool fix_alpha = spec.eta_fixed == EtaAxis::Alpha;
          std::vector<double> fixed;
          if (fix_alpha) fixed = spec.p ? std::vector<double>{*spec.p / scale} : spec.alpha;
          else fixed = spec.q ? std::vector<double>{*spec.q / scale} : spec.beta;
          for (double axis : fixed) {
            for (double target : spec.eta) {
              Cell cell = base;
              std::optional<double> solved;
              if (fix_alpha) {
                cell.alpha = axis;
                cell.p = axis * scale;
                solved = q_for_eta(n, cell.p, target, d);
                if (solved) {
                  cell.q = *solved;
                  cell.beta = cell.q / scale;
                }
              } else {
                cell.beta = axis;
                cell.q = axis * scale;
                solved = p_for_eta(n, cell.q, target, d);
                if (solved) {
                  cell.p = *solved;
                  cell.alpha = cell.p / scale;
                }
              }
              if (!solved || !(cell.p >= 0.0 && cell.p <= 1.0)) {
                std::ostringstream msg;
                msg << "n=" << n << " d=" << d << (fix_alpha ? " alpha=" : " beta=") << axis
                    << " eta=" << target << ": unreachable with probabilities in [0, 1]";
                plan.skipped.push_back(msg.str());
                continue;
              }
              finish(std::move(cell));
            }
          }
          continue;
        }

        const std::vector<double> alphas = spec.p ? std::vector<double>{*spec.p / scale} : spec.alpha;
        const std::vector<double> betas = spec.q ? std::vector<double>{*spec.q / scale} : spec.beta;
        for (double a : alphas) {
          for (double b : betas) {
            Cell cell = base;
            cell.alpha = a;
            cell.beta = b;
            cell.p = spec.p ? *spec.p : a * scale;
            cell.q = spec.q ? *spec.q : b * scale;
            finish(std::move(cell));
          }
        }
      }
    }
  }
  return plan;
}

void SweepSpec::validate() const {
  if (n.empty()) validation_error("n is required");
  if (d.empty()) validation_error("d is required");
  if (K < 1) validation_error("K must be >= 1");
  for (int v : n)
    if (v < 2 || v < K) validation_error("every n must be >= max(2, K)");
  for (int v : d)
    if (v < 1) validation_error("every d must be >= 1");
  if (!sizes.empty()) {
    if (n.size() != 1) validation_error("sizes requires a single n");
    if (static_cast<int>(sizes.size()) != K) validation_error("sizes must have K entries");
    if (std::accumulate(sizes.begin(), sizes.end(), 0) != n.front()) validation_error("sizes must sum to n");
    if (std::any_of(sizes.begin(), sizes.end(), [](int m) { return m < 1; }))
      validation_error("every cluster size must be >= 1");
  }
  const bool eta_mode = mode == SweepMode::EtaSweep;
  if (eta_mode) {
    if (eta.empty()) validation_error("eta-sweep needs eta targets");
    const bool have_fixed = eta_fixed == EtaAxis::Alpha ? (p || !alpha.empty()) : (q || !beta.empty());
    if (!have_fixed) validation_error("eta-sweep needs values for the fixed axis");
  } else {
    if (!p && alpha.empty()) validation_error("alpha or p is required");
    if (!q && beta.empty()) validation_error("beta or q is required");
  }
  if (p && !(*p >= 0.0 && *p <= 1.0)) validation_error("p must lie in [0, 1]");
  if (q && !(*q >= 0.0 && *q <= 1.0)) validation_error("q must lie in [0, 1]");
  if (sigma.empty()) validation_error("sigma needs at least one value");
  for (double s : sigma)
    if (!(s >= 0.0) || !std::isfinite(s)) validation_error("sigma must be finite and >= 0");
  if (mode == SweepMode::NoiseGrid && std::all_of(sigma.begin(), sigma.end(), [](double s) { return s == 0.0; }))
    validation_error("noise-grid needs a positive sigma");
  if (trials < 1) validation_error("trials must be >= 1");
  if (!(refine_fraction >= 0.0 && refine_fraction <= 1.0)) validation_error("refine_fraction must lie in [0, 1]");
  if (workers < 1) validation_error("workers must be >= 1");
  if (repetitions < 1) validation_error("repetitions must be >= 1");
  if (mode == SweepMode::Snr && K != 2) validation_error("snr mode needs K = 2");
  try {
    solver.validate();
  } catch (const Error& e) {
    validation_error(e.what());
  }
  const CellPlan plan = expand_cells(*this);
  if (plan.cells.empty()) validation_error("the sweep has no feasible cells");
}

}  // namespace clustersync::harness
