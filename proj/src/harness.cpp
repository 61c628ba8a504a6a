#include "actreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "actreg/csv.hpp"
#include "actreg/errors.hpp"
#include "actreg/features.hpp"
#include "actreg/leverage.hpp"
#include "actreg/linalg.hpp"
#include "actreg/sampler.hpp"
#include "actreg/tree.hpp"

namespace actreg {

SamplerKind sampler_from_name(const std::string& name) {
  if (name == "pivotal_pca") return SamplerKind::pivotal_pca;
  if (name == "pivotal_coordinate") return SamplerKind::pivotal_coordinate;
  if (name == "bernoulli") return SamplerKind::bernoulli;
  if (name == "uniform") return SamplerKind::uniform;
  if (name == "chebyshev_grid") return SamplerKind::chebyshev_grid;
  throw BadInput("unknown sampler '" + name + "'");
}

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::pivotal_pca: return "pivotal_pca";
    case SamplerKind::pivotal_coordinate: return "pivotal_coordinate";
    case SamplerKind::bernoulli: return "bernoulli";
    case SamplerKind::uniform: return "uniform";
    case SamplerKind::chebyshev_grid: return "chebyshev_grid";
  }
  throw BadInput("unknown sampler kind");
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadInput(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw BadInput("experiment config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.problem = problem_from_name(j.value("problem", std::string("oscillator2d")));
  cfg.n = j.value("n", cfg.n);
  cfg.degree = j.value("degree", cfg.degree);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.grid = j.value("grid", cfg.grid);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("sampler")) {
    cfg.samplers = {sampler_from_name(j.at("sampler").get<std::string>())};
  }
  if (j.contains("samplers")) {
    cfg.samplers.clear();
    for (const auto& s : j.at("samplers")) cfg.samplers.push_back(sampler_from_name(s));
  }
  if (j.contains("k_values")) {
    cfg.k_values.clear();
    for (const auto& k : j.at("k_values")) cfg.k_values.push_back(k.get<Index>());
  }
  if (cfg.trials < 1) throw BadInput("experiment config: trials must be >= 1");
  if (cfg.samplers.empty()) throw BadInput("experiment config: no samplers");
  return cfg;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json samplers = nlohmann::json::array();
  for (SamplerKind s : this->samplers) samplers.push_back(sampler_name(s));
  nlohmann::json j{{"schema_version", 1},
                   {"problem", problem_name(problem)},
                   {"n", n},
                   {"degree", degree},
                   {"samplers", samplers},
                   {"k_values", k_values},
                   {"trials", trials},
                   {"seed", seed},
                   {"grid", grid},
                   {"threads", threads}};
  return j.dump();
}

std::vector<Index> default_k_sweep(Index feature_count, Index n) {
  std::vector<Index> ks;
  Real k = static_cast<Real>(feature_count);
  const Real cap = static_cast<Real>(n) / 10.0;
  while (k <= cap) {
    auto rounded = static_cast<Index>(std::llround(k));
    if (ks.empty() || rounded > ks.back()) ks.push_back(rounded);
    k *= 1.15;
  }
  if (ks.empty()) ks.push_back(feature_count);
  return ks;
}

namespace {

// Lazy, thread-safe label oracle over a fixed point cloud.
class LabelStore {
 public:
  LabelStore(const TargetProblem& problem, Matrix points)
      : problem_(problem), points_(std::move(points)),
        values_(points_.rows()), known_(points_.rows(), false) {}

  Real label(Index row) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!known_[row]) {
      values_(row) = evaluate_target(problem_, points_.row(row).transpose());
      known_[row] = true;
    }
    return values_(row);
  }

  const Vector& all_labels() {
    for (Index i = 0; i < points_.rows(); ++i) label(i);
    return values_;
  }

  void preload(const Vector& values) {
    values_ = values;
    std::fill(known_.begin(), known_.end(), true);
  }

  const Matrix& points() const { return points_; }

 private:
  TargetProblem problem_;
  Matrix points_;
  Vector values_;
  std::vector<char> known_;
  std::mutex mu_;
};

Real relative_error(const Matrix& a, const Vector& b, const Vector& coeffs, Real b_norm_sq) {
  return (a * coeffs - b).squaredNorm() / b_norm_sq;
}

Vector column_median(const Matrix& errors) {
  Vector out(errors.rows());
  std::vector<Real> row(errors.cols());
  for (Index i = 0; i < errors.rows(); ++i) {
    for (Index t = 0; t < errors.cols(); ++t) row[t] = errors(i, t);
    std::sort(row.begin(), row.end());
    std::size_t m = row.size() / 2;
    out(i) = (row.size() % 2 == 1) ? row[m] : 0.5 * (row[m - 1] + row[m]);
  }
  return out;
}

// Deterministic stream for (sampler, k index, trial) regardless of the
// thread interleaving.
RngState trial_rng(std::uint64_t seed, std::size_t sampler_ord, std::size_t k_index,
                   Index trial) {
  return RngState{seed, 0, 0}
      .substream(1 + sampler_ord)
      .substream(k_index)
      .substream(static_cast<std::uint64_t>(trial));
}

void parallel_for(Index count, Index threads, const std::function<void(Index)>& body) {
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  Index workers = std::min(threads, count);
  std::exception_ptr error;
  std::mutex error_mu;
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (Index i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SamplerCurve chebyshev_curve(const TargetProblem& problem, const PolynomialBasisSpec& basis,
                             const Matrix& a, const Vector& b, Real b_norm_sq,
                             const std::vector<Index>& sweep) {
  // Deterministic baseline: for each k take the largest full tensor grid
  // that fits in the budget, label it, and fit unweighted least squares.
  const Index q = basis.input_dim;
  std::vector<Index> sizes;
  for (Index k : sweep) {
    auto m = static_cast<Index>(std::floor(std::pow(static_cast<Real>(k) + 0.5,
                                                    1.0 / static_cast<Real>(q))));
    while (m >= 2) {
      Index total = 1;
      for (Index i = 0; i < q; ++i) total *= m;
      if (total <= k) break;
      --m;
    }
    if (m < 2) continue;
    Index total = 1;
    for (Index i = 0; i < q; ++i) total *= m;
    if (sizes.empty() || total > sizes.back()) sizes.push_back(total);
  }
  if (sizes.empty()) throw InfeasibleK("chebyshev baseline: sweep has no room for a 2^q grid");

  SamplerCurve curve;
  curve.sampler = SamplerKind::chebyshev_grid;
  curve.k_values = sizes;
  curve.errors.resize(static_cast<Index>(sizes.size()), 1);
  curve.sample_sizes.resize(static_cast<Index>(sizes.size()), 1);
  curve.labels_used.resize(static_cast<Index>(sizes.size()), 1);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto m = static_cast<Index>(std::llround(std::pow(static_cast<Real>(sizes[i]),
                                                      1.0 / static_cast<Real>(q))));
    Matrix canonical = chebyshev_grid(m, q);
    Matrix raw(canonical.rows(), q);
    for (Index axis = 0; axis < q; ++axis) {
      auto [lo, hi] = problem.domain[axis];
      raw.col(axis) = lo + (hi - lo) * (canonical.col(axis).array() + 1.0) * 0.5;
    }
    LabelStore grid_store(problem, raw);
    Matrix ga = expand(canonical, basis);
    Vector gb(canonical.rows());
    Index requested = 0;
    for (Index r = 0; r < canonical.rows(); ++r) {
      gb(r) = grid_store.label(r);
      ++requested;
    }
    RegressionSolution fit = weighted_least_squares(ga, gb);
    auto row = static_cast<Index>(i);
    curve.errors(row, 0) = relative_error(a, b, fit.coefficients, b_norm_sq);
    curve.sample_sizes(row, 0) = static_cast<Real>(canonical.rows());
    curve.labels_used(row, 0) = static_cast<Real>(requested);
  }
  curve.medians = column_median(curve.errors);
  return curve;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& label_cache,
                                const std::function<void(const ExperimentResult&)>& on_progress) {
  TargetProblem problem = TargetProblem::make(cfg.problem);
  if (cfg.grid && cfg.problem != ProblemKind::oscillator3d)
    throw BadInput("run_experiment: grid mode is only defined for oscillator3d");

  RngState domain_rng = RngState{cfg.seed, 0, 0}.substream(0);
  Matrix raw = sample_domain(problem, cfg.n, domain_rng, cfg.grid);
  const Index n = raw.rows();

  PolynomialBasisSpec basis = PolynomialBasisSpec::total_degree(problem.dim(), cfg.degree);
  const Index d = basis.term_count();
  Matrix scaled = scale_to_unit_box(problem, raw);
  Matrix a = expand(scaled, basis);

  LabelStore store(problem, raw);
  if (!label_cache.empty() && std::filesystem::exists(label_cache)) {
    Matrix cached = read_matrix_csv(label_cache);
    if (cached.rows() != n || cached.cols() != raw.cols() + 1)
      throw IoError("label cache '" + label_cache + "' shape does not match this experiment");
    if ((cached.leftCols(raw.cols()) - raw).lpNorm<Eigen::Infinity>() != 0.0)
      throw IoError("label cache '" + label_cache + "' was built for different points");
    store.preload(cached.col(raw.cols()));
  }
  Vector b = store.all_labels();
  if (!label_cache.empty() && !std::filesystem::exists(label_cache)) {
    Matrix dump(n, raw.cols() + 1);
    dump.leftCols(raw.cols()) = raw;
    dump.col(raw.cols()) = b;
    write_matrix_csv(label_cache, dump);
  }
  const Real b_norm_sq = b.squaredNorm();
  if (b_norm_sq == 0.0) throw BadInput("run_experiment: labels are identically zero");

  ExperimentResult result;
  result.cfg = cfg;
  result.cfg.n = n;
  if (result.cfg.k_values.empty()) result.cfg.k_values = default_k_sweep(d, n);
  for (Index k : result.cfg.k_values) {
    if (k < d)
      throw InfeasibleK("run_experiment: k = " + std::to_string(k) +
                        " below the feature count " + std::to_string(d));
    if (k > n)
      throw InfeasibleK("run_experiment: k = " + std::to_string(k) + " above n = " +
                        std::to_string(n));
  }
  const std::vector<Index>& sweep = result.cfg.k_values;

  RegressionSolution opt = weighted_least_squares(a, b);
  result.opt_error = opt.residual_norm_sq / b_norm_sq;

  Index threads = cfg.threads;
  if (threads <= 0) threads = static_cast<Index>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  bool needs_scores = false;
  for (SamplerKind s : cfg.samplers)
    if (s == SamplerKind::pivotal_pca || s == SamplerKind::pivotal_coordinate ||
        s == SamplerKind::bernoulli)
      needs_scores = true;
  LeverageScores scores;
  if (needs_scores) scores = leverage_scores(a);

  for (std::size_t s_ord = 0; s_ord < cfg.samplers.size(); ++s_ord) {
    SamplerKind kind = cfg.samplers[s_ord];
    if (kind == SamplerKind::chebyshev_grid) {
      result.curves.push_back(chebyshev_curve(problem, basis, a, b, b_norm_sq, sweep));
      if (on_progress) on_progress(result);
      continue;
    }
    SamplerCurve curve;
    curve.sampler = kind;
    curve.k_values = sweep;
    auto rows = static_cast<Index>(sweep.size());
    curve.errors.resize(rows, cfg.trials);
    curve.sample_sizes.resize(rows, cfg.trials);
    curve.labels_used.resize(rows, cfg.trials);

    for (std::size_t ki = 0; ki < sweep.size(); ++ki) {
      Index k = sweep[ki];
      InclusionProbabilities probs;
      CompetitionTree tree;
      bool tree_based =
          kind == SamplerKind::pivotal_pca || kind == SamplerKind::pivotal_coordinate;
      if (tree_based || kind == SamplerKind::bernoulli) probs = inclusion_from_leverage(scores, k);
      bool all_deterministic = tree_based && (probs.probs.array() >= 1.0).all();
      if (tree_based && !all_deterministic)
        tree = build_tree(scaled, probs,
                          kind == SamplerKind::pivotal_pca ? SplitMethod::pca
                                                           : SplitMethod::coordinate);

      parallel_for(cfg.trials, threads, [&](Index trial) {
        RngState rng = trial_rng(cfg.seed, s_ord, ki, trial);
        SampleSet sample;
        switch (kind) {
          case SamplerKind::pivotal_pca:
          case SamplerKind::pivotal_coordinate:
            if (all_deterministic) {
              sample.indices.resize(n);
              std::iota(sample.indices.begin(), sample.indices.end(), Index{0});
              sample.weights = Vector::Ones(n);
              sample.k = n;
            } else {
              sample = pivotal_sample(tree, probs, rng);
            }
            break;
          case SamplerKind::bernoulli:
            sample = bernoulli_sample(probs, rng);
            break;
          case SamplerKind::uniform:
            sample = uniform_sample(n, k, rng);
            break;
          case SamplerKind::chebyshev_grid:
            break;  // handled above
        }
        // The fit sees only the sampled labels; count what it requested.
        Vector sampled_b(static_cast<Index>(sample.indices.size()));
        Index requested = 0;
        for (std::size_t j = 0; j < sample.indices.size(); ++j) {
          sampled_b(static_cast<Index>(j)) = store.label(sample.indices[j]);
          ++requested;
        }
        Matrix sa(static_cast<Index>(sample.indices.size()), d);
        for (std::size_t j = 0; j < sample.indices.size(); ++j) {
          auto r = static_cast<Index>(j);
          sa.row(r) = sample.weights(r) * a.row(sample.indices[j]);
          sampled_b(r) *= sample.weights(r);
        }
        RegressionSolution fit = weighted_least_squares(sa, sampled_b);
        auto row = static_cast<Index>(ki);
        curve.errors(row, trial) = relative_error(a, b, fit.coefficients, b_norm_sq);
        curve.sample_sizes(row, trial) = static_cast<Real>(sample.indices.size());
        curve.labels_used(row, trial) = static_cast<Real>(requested);
      });
    }
    curve.medians = column_median(curve.errors);
    result.curves.push_back(std::move(curve));
    if (on_progress) on_progress(result);
  }
  return result;
}

TargetTable samples_to_target(const ExperimentResult& result, Real multiple) {
  if (!(multiple > 0.0)) throw BadInput("samples_to_target: multiple must be positive");
  TargetTable table;
  table.multiple = multiple;
  table.threshold =
      result.opt_error > 1e-12 ? multiple * result.opt_error : 1e-10;

  std::optional<Real> pivotal, bernoulli;
  for (const SamplerCurve& curve : result.curves) {
    const Vector& med = curve.medians;
    Real k_star = -1.0;
    for (Index i = 0; i < med.size(); ++i) {
      if (med(i) <= table.threshold) {
        if (i == 0) {
          k_star = static_cast<Real>(curve.k_values.front());
        } else {
          Real m0 = med(i - 1), m1 = med(i);
          Real k0 = static_cast<Real>(curve.k_values[i - 1]);
          Real k1 = static_cast<Real>(curve.k_values[i]);
          k_star = k0 + (m0 - table.threshold) / (m0 - m1) * (k1 - k0);
        }
        break;
      }
    }
    if (k_star < 0.0)
      throw TargetNotReached(sampler_name(curve.sampler) + " never reaches " +
                             std::to_string(multiple) + " x OPT in the sweep");
    table.k_star.emplace_back(curve.sampler, k_star);
    if (curve.sampler == SamplerKind::pivotal_pca ||
        (curve.sampler == SamplerKind::pivotal_coordinate && !pivotal))
      pivotal = k_star;
    if (curve.sampler == SamplerKind::bernoulli) bernoulli = k_star;
  }
  if (pivotal && bernoulli) table.efficiency = *pivotal / *bernoulli;
  return table;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_trials_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out = open_out(path);
  out << "sampler,k,trial,relative_error\n";
  for (const SamplerCurve& curve : result.curves)
    for (std::size_t ki = 0; ki < curve.k_values.size(); ++ki)
      for (Index t = 0; t < curve.errors.cols(); ++t)
        out << sampler_name(curve.sampler) << ',' << curve.k_values[ki] << ',' << t << ','
            << format_real(curve.errors(static_cast<Index>(ki), t)) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_summary_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out = open_out(path);
  out << "sampler,k,median_error,opt_error\n";
  for (const SamplerCurve& curve : result.curves)
    for (std::size_t ki = 0; ki < curve.k_values.size(); ++ki)
      out << sampler_name(curve.sampler) << ',' << curve.k_values[ki] << ','
          << format_real(curve.medians(static_cast<Index>(ki))) << ','
          << format_real(result.opt_error) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace actreg
