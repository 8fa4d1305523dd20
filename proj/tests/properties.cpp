#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "clustersync/cpqr.hpp"
#include "clustersync/eigensolver.hpp"
#include "clustersync/linalg.hpp"
#include "clustersync/metrics.hpp"
#include "clustersync/model.hpp"
#include "clustersync/pipeline.hpp"
#include "clustersync/recovery.hpp"
#include "clustersync/rng.hpp"
#include "oracles.hpp"

namespace properties {

using namespace clustersync;

namespace {

constexpr std::uint64_t kSuiteSeed = 0x5eed;

// A case returns an empty string on success, otherwise a description.
using Case = std::function<std::string(Rng&, int)>;

Report run_suite(const std::string& name, int cases, const Case& body) {
  Report report;
  report.name = name;
  for (int c = 0; c < cases; ++c) {
    Rng rng(derive_key(kSuiteSeed, {std::hash<std::string>{}(name), static_cast<std::uint64_t>(c)}));
    std::string failure;
    try {
      failure = body(rng, c);
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    ++report.cases;
    if (!failure.empty()) {
      if (report.failures == 0) report.first_failure = "case " + std::to_string(c) + ": " + failure;
      ++report.failures;
    }
  }
  return report;
}

std::string fail_if(bool bad, const std::string& what, double value) {
  if (!bad) return {};
  std::ostringstream out;
  out << what << " (" << value << ")";
  return out.str();
}

Matrix gaussian(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

int uniform_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }

std::vector<int> shuffled(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

// Random instance with parameters drawn from the case stream.
oracle::Instance random_instance(Rng& rng, int max_nd) {
  const int d = uniform_int(rng, 1, 3);
  const int K = uniform_int(rng, 1, 3);
  const int n = uniform_int(rng, std::max(K, 2), std::max(K + 1, max_nd / d));
  const double p = 0.3 + 0.7 * rng.uniform();
  const double q = 0.3 * rng.uniform();
  const double sigma = rng.uniform() < 0.25 ? 0.3 * rng.uniform() : 0.0;
  return oracle::make_instance(n, K, d, p, q, rng(), sigma);
}

// ---------------------------------------------------------------- linalg

Report polar_factorization(int cases) {
  return run_suite("polar: orthogonal factor and reconstruction", cases, [](Rng& rng, int c) {
    const int d = 1 + c % 5;
    Matrix x = gaussian(d, d, rng);
    if (c % 4 == 0 && d > 1) x.col(0) = x.col(1) * rng.normal();  // rank deficient
    const PolarFactors f = polar_decompose(x);
    std::string out = fail_if(orthogonality_defect(f.orthogonal) > 1e-10, "P not orthogonal",
                              orthogonality_defect(f.orthogonal));
    const double recon = (f.orthogonal * f.psd - x).norm() / std::max(1.0, x.norm());
    if (out.empty()) out = fail_if(recon > 1e-8, "P W != X", recon);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(f.psd);
    if (out.empty()) out = fail_if((f.psd - f.psd.transpose()).norm() > 1e-10, "W not symmetric", 0);
    if (out.empty()) out = fail_if(es.eigenvalues().minCoeff() < -1e-10, "W not PSD", es.eigenvalues().minCoeff());
    return out;
  });
}

Report polar_minimizer(int cases) {
  return run_suite("polar: closest orthogonal matrix", cases, [](Rng& rng, int c) {
    const int d = 2 + c % 3;
    const Matrix x = gaussian(d, d, rng);
    const double best = (x - polar_factor(x)).norm();
    for (int t = 0; t < 100; ++t) {
      const Matrix y = sample_haar_orthogonal(d, rng);
      const double other = (x - y).norm();
      if (other < best - 1e-12) return fail_if(true, "random orthogonal Y is closer", best - other);
    }
    return std::string();
  });
}

Report householder_involution(int cases) {
  return run_suite("householder: symmetric involution mapping x to alpha e1", cases, [](Rng& rng, int c) {
    const int n = 1 + c % 8;
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.normal();
    if (c % 5 == 0 && n > 1) x(0) = 0.0;
    const Matrix q = householder_reflector(x);
    std::string out = fail_if((q - q.transpose()).norm() > 1e-12, "Q not symmetric", (q - q.transpose()).norm());
    const double inv = (q * q - Matrix::Identity(n, n)).norm();
    if (out.empty()) out = fail_if(inv > 1e-12, "Q Q != I", inv);
    const Vector y = q * x;
    const double tail = n > 1 ? y.tail(n - 1).cwiseAbs().maxCoeff() : 0.0;
    if (out.empty()) out = fail_if(tail > 1e-12 * std::max(1.0, x.norm()), "subdiagonal not cleared", tail);
    return out;
  });
}

Report haar_left_invariance(int cases) {
  return run_suite("haar: left-translated samples keep zero mean", cases, [](Rng& rng, int c) {
    const int d = 2 + c % 3;
    const Matrix l = sample_haar_orthogonal(d, rng);
    Matrix sum = Matrix::Zero(d, d);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) sum += l * sample_haar_orthogonal(d, rng);
    const double worst = (sum / draws).cwiseAbs().maxCoeff();
    return fail_if(worst >= 0.05, "mean entry too large", worst);
  });
}

// ----------------------------------------------------------------- model

Report model_structure(int cases) {
  return run_suite("model: symmetric, zero diagonal, orthogonal blocks", cases, [](Rng& rng, int) {
    const int d = uniform_int(rng, 1, 3), K = uniform_int(rng, 1, 3);
    const int n = uniform_int(rng, std::max(2, K), 30);
    const double p = rng.uniform(), q = rng.uniform();
    const auto inst = oracle::make_instance(n, K, d, p, q, rng());
    const Matrix dense = oracle::materialize(inst.a);
    if ((dense - dense.transpose()).norm() != 0.0) return std::string("not symmetric");
    for (int i = 0; i < n; ++i)
      if (dense.block(i * d, i * d, d, d).norm() != 0.0) return std::string("nonzero diagonal block");
    for (std::size_t idx = 0; idx < inst.a.block_count(); ++idx) {
      const auto e = inst.a.entries()[idx];
      const Matrix b = inst.a.stored_block(idx);
      if (orthogonality_defect(b) > 1e-10) return fail_if(true, "block not orthogonal", orthogonality_defect(b));
      if (inst.gt.labels[e.row] == inst.gt.labels[e.col] &&
          b != inst.gt.transforms[e.row] * inst.gt.transforms[e.col].transpose())
        return std::string("within-cluster block differs from O_i O_j^T");
    }
    return std::string();
  });
}

Report model_determinism(int cases) {
  return run_suite("model: bit-reproducible generation", cases, [](Rng& rng, int) {
    const int d = uniform_int(rng, 1, 3), K = uniform_int(rng, 1, 3);
    const int n = uniform_int(rng, std::max(2, K), 25);
    const double p = rng.uniform(), q = rng.uniform();
    const std::uint64_t seed = rng();
    const double sigma = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
    const auto a = oracle::make_instance(n, K, d, p, q, seed, sigma);
    const auto b = oracle::make_instance(n, K, d, p, q, seed, sigma);
    if (!(a.a == b.a)) return std::string("observations differ");
    for (int i = 0; i < n; ++i)
      if (a.gt.transforms[i] != b.gt.transforms[i]) return std::string("transforms differ");
    const SparseBlockMatrix clean = clean_observation(a.gt);
    if (!(generate_observation(a.gt, 1.0, 0.0, seed) == clean)) return std::string("p=1,q=0 differs from clean");
    return std::string();
  });
}

// ------------------------------------------------------------ eigensolver

Report eigensolver_oracle(int cases) {
  return run_suite("eigensolver: matches dense oracle", cases, [](Rng& rng, int) {
    const auto inst = random_instance(rng, 60);
    const int nd = static_cast<int>(inst.a.dim());
    const int k = std::min(nd, inst.gt.K * inst.gt.d);
    SolverConfig cfg;
    cfg.tolerance = 1e-10;
    cfg.seed = rng();
    const EigenBasis basis = top_eigenpairs(inst.a, k, cfg);
    const oracle::DenseEigen ref = oracle::dense_top(oracle::materialize(inst.a), k);
    const double scale = std::max(1.0, std::abs(ref.values(0)));
    const double err = (basis.values - ref.values).cwiseAbs().maxCoeff();
    std::string out = fail_if(err > 1e-6 * scale, "eigenvalues differ", err);
    if (out.empty())
      out = fail_if(orthogonality_defect(basis.vectors) > 1e-8, "basis not orthonormal",
                    orthogonality_defect(basis.vectors));
    for (int i = 1; i < k && out.empty(); ++i)
      out = fail_if(basis.values(i) > basis.values(i - 1), "values not sorted", basis.values(i));
    return out;
  });
}

// ------------------------------------------------------------------ cpqr

Report cpqr_reconstruction(int cases) {
  return run_suite("cpqr: orthogonal Q, reconstruction, triangular lead", cases, [](Rng& rng, int c) {
    const int K = uniform_int(rng, 1, 4), d = uniform_int(rng, 1, 4), n = uniform_int(rng, K, K + 10);
    Matrix x = gaussian(K * d, n * d, rng);
    if (c % 7 == 0 && n > 1) x.middleCols(0, d).setZero();
    const BlockCpqrFactors f = blockwise_cpqr(x, d);
    const double recon = (x - f.q * f.r).norm();
    std::string out = fail_if(recon > 1e-8 * std::max(1.0, x.norm()), "reconstruction", recon);
    if (out.empty()) out = fail_if(orthogonality_defect(f.q) > 1e-10, "Q not orthogonal", orthogonality_defect(f.q));
    const Matrix lead = apply_block_permutation(f.r, f.perm, d).leftCols(K * d);
    const double below = lead.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm();
    if (out.empty()) out = fail_if(below != 0.0, "leading block not upper triangular", below);
    return out;
  });
}

Report cpqr_pivot_rule(int cases) {
  return run_suite("cpqr: pivot has the largest residual each round", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 4), d = uniform_int(rng, 1, 3), n = uniform_int(rng, K, K + 8);
    const Matrix x = gaussian(K * d, n * d, rng);
    const BlockCpqrFactors f = blockwise_cpqr(x, d);
    // Reflectors of rounds >= t only mix rows t*d.., so column norms over
    // those rows of Q^T X equal the residuals seen in round t.
    const Matrix qtx = f.q.transpose() * x;
    for (int t = 0; t < K; ++t) {
      const auto rows = qtx.bottomRows((K - t) * d);
      const double chosen = rows.middleCols(f.pivots[t] * d, d).norm();
      for (int s = t; s < n; ++s) {
        const int j = f.perm[s];
        const double other = rows.middleCols(j * d, d).norm();
        if (other > chosen * (1 + 1e-12) + 1e-14) return fail_if(true, "unchosen column has larger residual", other - chosen);
      }
    }
    return std::string();
  });
}

Report cpqr_orthogonal_invariance(int cases) {
  return run_suite("cpqr: pivots invariant under left orthogonal maps", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 4), d = uniform_int(rng, 1, 3), n = uniform_int(rng, K + 1, K + 8);
    const Matrix x = gaussian(K * d, n * d, rng);
    const Matrix l = sample_haar_orthogonal(K * d, rng);
    const BlockCpqrFactors a = blockwise_cpqr(x, d);
    const BlockCpqrFactors b = blockwise_cpqr(l * x, d);
    if (a.pivots != b.pivots) return std::string("pivot sequences differ");
    return std::string();
  });
}

Report block_permutation_structure(int cases) {
  return run_suite("cpqr: block permutations keep columns within blocks in order", cases, [](Rng& rng, int) {
    const int d = uniform_int(rng, 1, 4), n = uniform_int(rng, 1, 12);
    Matrix tagged(1, n * d);
    for (int c = 0; c < n * d; ++c) tagged(0, c) = c;
    const std::vector<int> perm = shuffled(n, rng);
    const Matrix moved = apply_block_permutation(tagged, perm, d);
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < d; ++c)
        if (moved(0, j * d + c) != perm[j] * d + c) return std::string("column moved inside its block");
    if (apply_inverse_block_permutation(moved, perm, d) != tagged) return std::string("round trip failed");
    // The implied nd x nd permutation is Pi_n kron I_d.
    Matrix pn = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) pn(perm[j], j) = 1.0;
    Matrix kron = Matrix::Zero(n * d, n * d);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (pn(a, b) != 0.0) kron.block(a * d, b * d, d, d) = Matrix::Identity(d, d);
    if ((tagged * kron - moved).norm() != 0.0) return std::string("not a Kronecker permutation");
    return std::string();
  });
}

// -------------------------------------------------------------- recovery

Report recovery_label_equivariance(int cases) {
  return run_suite("recovery: relabeling block rows permutes labels", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 2, 4), d = uniform_int(rng, 1, 3), n = uniform_int(rng, K, K + 15);
    const BlockCpqrFactors f = blockwise_cpqr(gaussian(K * d, n * d, rng), d);
    const std::vector<int> rows = shuffled(K, rng);
    BlockCpqrFactors g = f;
    for (int k = 0; k < K; ++k) {
      g.r.middleRows(k * d, d) = f.r.middleRows(rows[k] * d, d);
      g.q.middleCols(k * d, d) = f.q.middleCols(rows[k] * d, d);
    }
    const RecoveryResult a = assign_and_extract(f, K, d);
    const RecoveryResult b = assign_and_extract(g, K, d);
    for (int i = 0; i < n; ++i)
      if (rows[b.labels[i]] != a.labels[i]) return std::string("labels not permuted consistently");
    if (!exact_recovery(a.labels, b.labels, K)) return std::string("partition changed");
    return std::string();
  });
}

Report recovery_clean_gauge(int cases) {
  return run_suite("recovery: clean case has one gauge per cluster", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 3), d = uniform_int(rng, 1, 3);
    const int n = uniform_int(rng, 3 * K, 12 * K);
    const auto inst = oracle::make_instance(n, K, d, 1.0, 0.0, rng());
    PipelineOptions opt;
    opt.solver.seed = rng();
    const PipelineResult run = run_pipeline(inst.a, K, opt);
    if (!oracle::same_partition(run.result.labels, inst.gt.labels, K)) return std::string("clusters not exact");
    for (int k = 0; k < K; ++k) {
      const auto members = inst.gt.members(k);
      Matrix cross = Matrix::Zero(d, d);
      for (int i : members) cross += inst.gt.transforms[i].transpose() * run.result.transforms[i];
      const Matrix g = oracle::polar(cross);
      for (int i : members) {
        const double err = (run.result.transforms[i] - inst.gt.transforms[i] * g).norm();
        if (err > 1e-8) return fail_if(true, "gauge residual", err);
      }
    }
    return std::string();
  });
}

Report recovery_outputs_orthogonal(int cases) {
  return run_suite("recovery: outputs orthogonal, refinement confined to S_eps", cases, [](Rng& rng, int) {
    const auto inst = random_instance(rng, 80);
    const int K = inst.gt.K;
    PipelineOptions opt;
    opt.solver.seed = rng();
    opt.refine = RefineMode::Both;
    const PipelineResult run = run_pipeline(inst.a, K, opt);
    for (const auto& o : run.result.transforms)
      if (orthogonality_defect(o) > 1e-8) return fail_if(true, "transform not orthogonal", orthogonality_defect(o));
    std::vector<char> in_set(run.initial.labels.size(), 0);
    for (int i : run.result.refined_nodes) in_set[i] = 1;
    for (std::size_t i = 0; i < in_set.size(); ++i)
      if (!in_set[i] && run.result.labels[i] != run.initial.labels[i]) return std::string("label outside S_eps changed");
    return std::string();
  });
}

// --------------------------------------------------------------- metrics

Report metrics_partition_invariance(int cases) {
  return run_suite("metrics: exact recovery ignores label names and node order", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 4), n = uniform_int(rng, K, 30);
    std::vector<int> truth(n), est(n);
    for (int i = 0; i < n; ++i) truth[i] = i < K ? i : uniform_int(rng, 0, K - 1);
    for (int i = 0; i < n; ++i) est[i] = rng.uniform() < 0.8 ? truth[i] : uniform_int(rng, 0, K - 1);
    const bool base = exact_recovery(est, truth, K);
    const std::vector<int> names = shuffled(K, rng);
    std::vector<int> renamed(n);
    for (int i = 0; i < n; ++i) renamed[i] = names[est[i]];
    if (exact_recovery(renamed, truth, K) != base) return std::string("label renaming changed the result");
    const std::vector<int> order = shuffled(n, rng);
    std::vector<int> est_p(n), truth_p(n);
    for (int i = 0; i < n; ++i) {
      est_p[i] = est[order[i]];
      truth_p[i] = truth[order[i]];
    }
    if (exact_recovery(est_p, truth_p, K) != base) return std::string("node reordering changed the result");
    if (exact_recovery(truth, truth, K) != true) return std::string("identity not recovered");
    return std::string();
  });
}

Report metrics_gauge_invariance(int cases) {
  return run_suite("metrics: sync error absorbs a per-cluster gauge", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 3), d = uniform_int(rng, 1, 4), n = uniform_int(rng, 2 * K, 20);
    const auto inst = oracle::make_instance(n, K, d, 1.0, 0.0, rng());
    std::vector<Matrix> est;
    for (int i = 0; i < n; ++i) {
      const Matrix noise = 0.05 * gaussian(d, d, rng);
      est.push_back(polar_factor(inst.gt.transforms[i] + noise));
    }
    std::vector<Matrix> gauges;
    for (int k = 0; k < K; ++k) gauges.push_back(sample_haar_orthogonal(d, rng));
    std::vector<Matrix> moved = est;
    for (int i = 0; i < n; ++i) moved[i] = est[i] * gauges[inst.gt.labels[i]];
    const double a = sync_error(est, inst.gt), b = sync_error(moved, inst.gt);
    return fail_if(std::abs(a - b) > 1e-9, "gauge changed the error", a - b);
  });
}

Report metrics_eta_monotone(int cases) {
  return run_suite("metrics: eta strictly decreasing in p", cases, [](Rng& rng, int) {
    const int n = uniform_int(rng, 10, 5000), d = uniform_int(rng, 1, 30);
    const double q = rng.uniform() * 0.5;
    double previous = std::numeric_limits<double>::infinity();
    for (double p : {0.2, 0.4, 0.6, 0.8}) {
      const double value = eta(n, p, q, d);
      if (!(value < previous)) return fail_if(true, "eta not decreasing", value);
      previous = value;
    }
    return std::string();
  });
}

// ------------------------------------------------------------ end to end

Report pipeline_determinism(int cases) {
  return run_suite("pipeline: deterministic and order invariant", cases, [](Rng& rng, int) {
    const int K = uniform_int(rng, 1, 3), d = uniform_int(rng, 1, 3), n = uniform_int(rng, 4 * K, 15 * K);
    const auto inst = oracle::make_instance(n, K, d, 1.0, 0.0, rng());
    PipelineOptions opt;
    opt.solver.seed = rng();
    const PipelineResult a = run_pipeline(inst.a, K, opt);
    const PipelineResult b = run_pipeline(inst.a, K, opt);
    if (a.result.labels != b.result.labels) return std::string("labels differ between runs");
    for (int i = 0; i < n; ++i)
      if (a.result.transforms[i] != b.result.transforms[i]) return std::string("transforms differ between runs");
    // Shuffling node order shuffles the recovered partition with it.
    const std::vector<int> perm = shuffled(n, rng);
    const GroundTruth moved = permute_nodes(inst.gt, perm);
    const PipelineResult c = run_pipeline(clean_observation(moved), K, opt);
    if (!exact_recovery(c.result.labels, moved.labels, K)) return std::string("permuted instance not recovered");
    return std::string();
  });
}

}  // namespace

std::vector<Report> run_all(int cases) {
  return {
      polar_factorization(cases),
      polar_minimizer(cases),
      householder_involution(cases),
      haar_left_invariance(cases),
      model_structure(cases),
      model_determinism(cases),
      eigensolver_oracle(cases),
      cpqr_reconstruction(cases),
      cpqr_pivot_rule(cases),
      cpqr_orthogonal_invariance(cases),
      block_permutation_structure(cases),
      recovery_label_equivariance(cases),
      recovery_clean_gauge(cases),
      recovery_outputs_orthogonal(cases),
      metrics_partition_invariance(cases),
      metrics_gauge_invariance(cases),
      metrics_eta_monotone(cases),
      pipeline_determinism(cases),
  };
}

}  // namespace properties
