// Release gate: every criterion the library must meet, one PASS/FAIL line
// each, nonzero exit if anything fails.  Thresholds are pinned here on
// purpose; do not widen them to make a run green.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "actreg/continuum.hpp"
#include "actreg/features.hpp"
#include "actreg/harness.hpp"
#include "actreg/leverage.hpp"
#include "actreg/linalg.hpp"
#include "actreg/problems.hpp"
#include "actreg/quadrature.hpp"
#include "actreg/sampler.hpp"
#include "actreg/tree.hpp"
#include "actreg/verify.hpp"

using namespace actreg;

namespace {

struct Check {
  int id;
  std::string label;
  double budget_seconds;
  std::function<bool(std::ostringstream&)> run;
};

Matrix random_matrix(Index rows, Index cols, RngState& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

Vector random_vector(Index n, RngState& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.next_gaussian();
  return v;
}

InclusionProbabilities random_probs(Index n, Index k, RngState& rng) {
  Vector u(n);
  for (Index i = 0; i < n; ++i) u(i) = 0.05 + rng.next_double();
  u *= static_cast<Real>(k) / u.sum();
  return probability_ceiling(u, k);
}

struct RandomConfig {
  CompetitionTree tree;
  InclusionProbabilities probs;
  Index n;
  Index k;
};

RandomConfig random_config(Index n_lo, Index n_hi, RngState& rng) {
  RandomConfig cfg;
  cfg.n = n_lo + static_cast<Index>(rng.next_u64() % (n_hi - n_lo + 1));
  cfg.k = 1 + static_cast<Index>(rng.next_u64() % std::max<Index>(1, cfg.n - 1));
  cfg.probs = random_probs(cfg.n, cfg.k, rng);
  if (rng.next_u64() % 2 == 0) {
    cfg.tree = random_tree(cfg.probs, rng);
  } else {
    Matrix pts = random_matrix(cfg.n, 2, rng);
    cfg.tree = build_tree(pts, cfg.probs, SplitMethod::pca);
  }
  return cfg;
}

// Structured regression family shared by the embedding checks: random
// low-dimensional points expanded in a total-degree basis, so leverage
// varies across rows and the tree has geometry to work with.
struct EmbeddingSetup {
  Matrix points;
  Matrix a;
  Matrix u;
  InclusionProbabilities probs;
  CompetitionTree tree;
};

EmbeddingSetup embedding_setup(Index n, Index input_dim, Index degree, Index k,
                               RngState& rng) {
  EmbeddingSetup s;
  s.points = Matrix(n, input_dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < input_dim; ++j) s.points(i, j) = 2.0 * rng.next_double() - 1.0;
  s.a = expand(s.points, PolynomialBasisSpec::total_degree(input_dim, degree));
  s.u = orthonormal_basis(s.a);
  LeverageScores scores;
  scores.scores = s.u.rowwise().squaredNorm();
  scores.rank = s.u.cols();
  s.probs = inclusion_from_leverage(scores, k);
  s.tree = build_tree(s.points, s.probs, SplitMethod::pca);
  return s;
}

bool criterion_marginals(std::ostringstream& detail) {
  RngState rng{0xACCE9701u, 0, 0};
  Real worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    RandomConfig cfg = random_config(2, 10, rng);
    Vector err = enumerate_pivotal(cfg.tree, cfg.probs).marginals() - cfg.probs.probs;
    worst = std::max(worst, err.lpNorm<Eigen::Infinity>());
  }
  detail << "max marginal error " << worst << " over 50 trees";
  return worst <= 1e-12;
}

bool criterion_homogeneity(std::ostringstream& detail) {
  RngState rng{0xACCE9702u, 0, 0};
  for (int rep = 0; rep < 20; ++rep) {
    RandomConfig cfg = random_config(2, 10, rng);
    SampleDistribution dist = enumerate_pivotal(cfg.tree, cfg.probs);
    for (const auto& [rows, prob] : dist.outcomes)
      if (static_cast<Index>(rows.size()) != cfg.k) {
        detail << "enumerated outcome of size " << rows.size() << " wanted " << cfg.k;
        return false;
      }
  }
  RandomConfig cfg = random_config(10, 10, rng);
  for (int draw = 0; draw < 10000; ++draw) {
    SampleSet s = pivotal_sample(cfg.tree, cfg.probs, rng);
    if (static_cast<Index>(s.indices.size()) != cfg.k) {
      detail << "draw " << draw << " selected " << s.indices.size() << " wanted " << cfg.k;
      return false;
    }
  }
  detail << "all enumerated outcomes and 10000 draws have exactly k rows";
  return true;
}

bool criterion_influence(std::ostringstream& detail) {
  RngState rng{0xACCE9703u, 0, 0};
  Real worst_dinf = 0.0, worst_row = 0.0;
  for (int rep = 0; rep < 8; ++rep) {
    RandomConfig cfg = random_config(4, 8, rng);
    SampleDistribution dist = enumerate_pivotal(cfg.tree, cfg.probs);
    worst_dinf = std::max(worst_dinf, d_inf(dist, cfg.n));  // full sweep
    InfluenceReport rep0 = influence_report(dist, {});
    for (Index i = 0; i < cfg.n; ++i) {
      Real row_sum = rep0.influence.row(i).lpNorm<1>();
      worst_row = std::max(row_sum - (2.0 - 2.0 * cfg.probs.probs(i)),
                           std::max(worst_row, (2.0 - 2.0 * cfg.probs.probs(i)) - row_sum));
    }
  }
  Vector p(6);
  p << 0.15, 0.3, 0.45, 0.6, 0.75, 0.9;
  Real bern = d_inf(enumerate_bernoulli(p), 6);
  detail << "pivotal max " << worst_dinf << ", row-sum error " << worst_row
         << ", bernoulli " << bern;
  return worst_dinf <= 2.0 + 1e-9 && worst_row <= 1e-9 && bern <= 1.0 + 1e-12;
}

bool criterion_negative_correlation(std::ostringstream& detail) {
  RngState rng{0xACCE9704u, 0, 0};
  Index violations = 0;
  Real worst_excess = -1.0;
  for (int rep = 0; rep < 20; ++rep) {
    RandomConfig cfg = random_config(2, 10, rng);
    SampleDistribution dist = enumerate_pivotal(cfg.tree, cfg.probs);
    violations += negative_correlation_violations(dist);
    Vector marg = dist.marginals();
    Matrix joint = Matrix::Zero(cfg.n, cfg.n);
    for (const auto& [rows, prob] : dist.outcomes)
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
          joint(rows[a], rows[b]) += prob;
        }
    for (Index i = 0; i < cfg.n; ++i)
      for (Index j = i + 1; j < cfg.n; ++j)
        worst_excess = std::max(worst_excess, joint(i, j) - marg(i) * marg(j));
  }
  detail << violations << " violating pairs, worst joint excess " << worst_excess;
  return violations == 0 && worst_excess <= 1e-12;
}

bool criterion_embedding(std::ostringstream& detail) {
  RngState rng{0xACCE9705u, 0, 0};
  const Index n = 2000, d = 10;
  const Index k = static_cast<Index>(std::ceil(4.0 * d * std::log(static_cast<Real>(d))));
  EmbeddingSetup s = embedding_setup(n, 2, 3, k, rng);
  int passes = 0;
  Real worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    RngState draw{0xACCE9705u, static_cast<std::uint64_t>(seed + 1), 0};
    Real dev = embedding_deviation(s.u, pivotal_sample(s.tree, s.probs, draw));
    worst = std::max(worst, dev);
    if (dev <= 0.5) ++passes;
  }
  detail << "k=" << k << ", " << passes << "/100 within 0.5, worst " << worst;
  return passes >= 95;
}

bool criterion_regression_bound(std::ostringstream& detail) {
  RngState rng{0xACCE9706u, 0, 0};
  const Index n = 5000;
  const Real eps = 0.25;
  EmbeddingSetup s = embedding_setup(n, 3, 3, /*placeholder k*/ 21, rng);
  const Index d = s.a.cols();  // 20 features over 3 inputs at degree 3
  const Index k = static_cast<Index>(
      std::ceil(8.0 * (d * std::log(static_cast<Real>(d)) + d / eps)));
  LeverageScores scores;
  scores.scores = s.u.rowwise().squaredNorm();
  scores.rank = d;
  s.probs = inclusion_from_leverage(scores, k);
  s.tree = build_tree(s.points, s.probs, SplitMethod::pca);

  Vector x_true = random_vector(d, rng);
  Vector signal = s.a * x_true;
  signal /= signal.norm();
  Vector noise = random_vector(n, rng);
  noise -= s.u * (s.u.transpose() * noise);  // adversarial: orthogonal to the span
  noise *= 0.5 / noise.norm();
  Vector b = signal + noise;
  Real opt = noise.squaredNorm();

  int passes = 0;
  Real worst_ratio = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    RngState draw{0xACCE9706u, static_cast<std::uint64_t>(seed + 1), 0};
    SampleSet sample = pivotal_sample(s.tree, s.probs, draw);
    auto [sa, sb] = subsample_system(s.a, b, sample);
    RegressionSolution fit = weighted_least_squares(sa, sb);
    Real residual = (s.a * fit.coefficients - b).squaredNorm();
    Real ratio = residual / opt;
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio <= 1.0 + eps) ++passes;
  }
  detail << "d=" << d << ", k=" << k << ", " << passes << "/100 within 1+eps, worst ratio "
         << worst_ratio;
  return passes >= 90;
}

bool criterion_efficiency(std::ostringstream& detail) {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::oscillator2d;
  cfg.n = 10000;
  cfg.degree = 20;
  cfg.samplers = {SamplerKind::pivotal_pca, SamplerKind::bernoulli};
  cfg.trials = 200;
  cfg.seed = 20260815;
  ExperimentResult result = run_experiment(cfg);
  TargetTable table = samples_to_target(result, 2.0);
  if (!table.efficiency.has_value()) {
    detail << "no efficiency ratio (missing curve)";
    return false;
  }
  // The central empirical claim: in the sweep's converging region the
  // pivotal median never falls behind the Bernoulli median.
  const SamplerCurve* pivotal = nullptr;
  const SamplerCurve* bernoulli = nullptr;
  for (const auto& curve : result.curves) {
    if (curve.sampler == SamplerKind::pivotal_pca) pivotal = &curve;
    if (curve.sampler == SamplerKind::bernoulli) bernoulli = &curve;
  }
  int ordering_violations = 0;
  for (Index i = 0; i < bernoulli->medians.size(); ++i) {
    Real bm = bernoulli->medians(i);
    if (bm >= 1.2 * result.opt_error && bm <= 4.0 * result.opt_error &&
        pivotal->medians(i) > bm)
      ++ordering_violations;
  }
  detail << "efficiency " << *table.efficiency << " (target <= 0.85), ordering violations "
         << ordering_violations;
  return *table.efficiency <= 0.85 && ordering_violations == 0;
}

bool criterion_continuum_scaling(std::ostringstream& detail) {
  std::ostringstream rows;
  bool ok = true;
  for (Index d : {3, 5, 8}) {
    LeverageDensity density{d, -1.0, 1.0};
    std::vector<Real> medians;
    std::vector<Index> ks;
    for (Index mult : {10, 20, 40, 80}) {
      Index k = mult * (d + 1);
      ks.push_back(k);
      Vector bounds = build_partition(density, k);
      ContinuumSampler sampler(density, bounds);
      std::vector<Real> errs(100);
      for (int seed = 0; seed < 100; ++seed) {
        RngState rng{0xACCE9708u, static_cast<std::uint64_t>(1000 * d + seed), 0};
        Vector coeffs = random_vector(d + 1, rng);
        errs[seed] = embedding_error(density, sampler.sample(rng), coeffs);
      }
      std::nth_element(errs.begin(), errs.begin() + 50, errs.end());
      medians.push_back(errs[50]);
    }
    rows << " d=" << d << ":";
    for (std::size_t i = 0; i < medians.size(); ++i) {
      Real scaled = medians[i] * ks[i] / (d + 1.0);
      rows << " " << scaled;
      if (scaled > 10.0) ok = false;
      if (i > 0 && medians[i] > medians[i - 1]) ok = false;
      // 1/k decay dominates any 1/sqrt(k) curve anchored at the first point.
      if (i > 0 && medians[i] > medians[0] * std::sqrt(static_cast<Real>(ks[0]) / ks[i]))
        ok = false;
    }
  }
  detail << "median error * k/(d+1):" << rows.str();
  return ok;
}

bool criterion_leverage_identities(std::ostringstream& detail) {
  RngState rng{0xACCE9709u, 0, 0};
  Real worst_sum = 0.0, worst_invariance = 0.0, worst_mass = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    Index n = 30 + static_cast<Index>(rng.next_u64() % 170);
    Index d = 3 + static_cast<Index>(rng.next_u64() % 10);
    Matrix a = random_matrix(n, d, rng);
    LeverageScores s = leverage_scores(a);
    worst_sum = std::max(worst_sum, std::abs(s.scores.sum() - static_cast<Real>(d)));
    Matrix basis_change = Matrix::Identity(d, d) + 0.3 * random_matrix(d, d, rng);
    Vector after = leverage_scores(a * basis_change).scores;
    worst_invariance =
        std::max(worst_invariance, (after - s.scores).lpNorm<Eigen::Infinity>());
  }
  for (Index d = 0; d <= 10; ++d) {
    LeverageDensity density{d, -1.0, 1.0};
    worst_mass =
        std::max(worst_mass, std::abs(tau_mass(density, -1.0, 1.0) - (d + 1.0)));
  }
  detail << "sum error " << worst_sum << ", basis-change error " << worst_invariance
         << ", density mass error " << worst_mass;
  return worst_sum <= 1e-6 && worst_invariance <= 1e-8 && worst_mass <= 1e-8;
}

bool criterion_ceiling(std::ostringstream& detail) {
  RngState rng{0xACCE9710u, 0, 0};
  Real worst_sum = 0.0, worst_form = 0.0;
  bool idempotent = true;
  for (int rep = 0; rep < 100; ++rep) {
    Index n = 2 + static_cast<Index>(rng.next_u64() % 59);
    Index k = 1 + static_cast<Index>(rng.next_u64() % n);
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = 0.02 + rng.next_double();
    if (n > 4) {
      u(0) *= 10.0;  // force repeated capping passes
      u(1) *= 5.0;
    }
    u *= static_cast<Real>(k) / u.sum();
    InclusionProbabilities out = probability_ceiling(u, k);
    worst_sum = std::max(worst_sum, std::abs(out.probs.sum() - static_cast<Real>(k)));
    for (Index i = 0; i < n; ++i)
      worst_form = std::max(
          worst_form, std::abs(out.probs(i) - std::min(1.0, out.ceiling_constant * u(i))));
    InclusionProbabilities again = probability_ceiling(out.probs, k);
    for (Index i = 0; i < n; ++i)
      if (again.probs(i) != out.probs(i)) idempotent = false;
  }
  Vector t1(3), t2(3), t3(3);
  t1 << 0.5, 0.5, 1.0;
  t2 << 2.0, 0.5, 0.5;
  t3 << 1.8, 0.9, 0.3;
  Vector r1 = probability_ceiling(t1, 2).probs;
  Vector r2 = probability_ceiling(t2, 3).probs;
  Vector r3 = probability_ceiling(t3, 3).probs;
  bool traces = r1(0) == 0.5 && r1(1) == 0.5 && r1(2) == 1.0 && r2(0) == 1.0 &&
                r2(1) == 1.0 && r2(2) == 1.0 && r3(0) == 1.0 && r3(1) == 1.0 &&
                r3(2) == 1.0;
  detail << "sum error " << worst_sum << ", min-form error " << worst_form
         << ", idempotent " << (idempotent ? "yes" : "no") << ", hand traces "
         << (traces ? "exact" : "WRONG");
  return worst_sum <= 1e-9 && worst_form <= 1e-9 && idempotent && traces;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {1, "exact marginals from enumeration", 10.0, criterion_marginals},
      {2, "every outcome has exactly k rows", 30.0, criterion_homogeneity},
      {3, "influence bound d_inf <= 2 with exact row sums", 120.0, criterion_influence},
      {4, "pairwise negative correlation", 60.0, criterion_negative_correlation},
      {5, "spectral embedding at k = ceil(4 d ln d)", 120.0, criterion_embedding},
      {6, "(1+eps) regression bound on an adversarial residual", 180.0,
       criterion_regression_bound},
      {7, "sampling efficiency against the Bernoulli baseline", 1800.0,
       criterion_efficiency},
      {8, "continuum error decays like (d+1)/k", 300.0, criterion_continuum_scaling},
      {9, "leverage sums, basis invariance, density mass", 60.0,
       criterion_leverage_identities},
      {10, "probability ceiling: sum, min form, idempotence, traces", 60.0,
       criterion_ceiling},
  };

  int failures = 0;
  for (const auto& check : checks) {
    std::ostringstream detail;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
      ok = check.run(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
      ok = false;
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > check.budget_seconds) {
      detail << " [OVER BUDGET " << check.budget_seconds << "s]";
      ok = false;
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << check.id << ". " << check.label << ": "
              << detail.str() << "  [" << elapsed << "s]" << std::endl;
    if (!ok) ++failures;
  }
  if (failures > 0) std::cout << failures << " criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
