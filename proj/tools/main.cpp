// Command-line front end for the sampling pipeline.
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "actreg/continuum.hpp"
#include "actreg/csv.hpp"
#include "actreg/errors.hpp"
#include "actreg/features.hpp"
#include "actreg/harness.hpp"
#include "actreg/leverage.hpp"
#include "actreg/linalg.hpp"
#include "actreg/sampler.hpp"
#include "actreg/tree.hpp"
#include "actreg/verify.hpp"

namespace {

using namespace actreg;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

InclusionProbabilities load_probs(const std::string& path) {
  Vector p = read_vector_csv(path);
  InclusionProbabilities probs;
  probs.probs = p;
  KahanSum total;
  for (Index i = 0; i < p.size(); ++i) total.add(p(i));
  probs.k = static_cast<Index>(std::llround(total.value()));
  return probs;
}

int run_levscores(const std::string& in, const std::string& out) {
  LeverageScores scores = leverage_scores(read_matrix_csv(in));
  if (out.empty()) {
    for (Index i = 0; i < scores.scores.size(); ++i)
      std::cout << format_real(scores.scores(i)) << '\n';
  } else {
    write_vector_csv(out, scores.scores);
  }
  return 0;
}

int run_tree(const std::string& x_path, const std::string& probs_path,
             const std::string& method, const std::string& out) {
  Matrix x = read_matrix_csv(x_path);
  InclusionProbabilities probs = load_probs(probs_path);
  SplitMethod split;
  if (method == "pca")
    split = SplitMethod::pca;
  else if (method == "coordinate")
    split = SplitMethod::coordinate;
  else
    throw BadInput("tree: method must be pca or coordinate, got '" + method + "'");
  spill(out, tree_to_json(build_tree(x, probs, split)) + "\n");
  return 0;
}

int run_sample(const std::string& tree_path, const std::string& probs_path,
               std::uint64_t seed, std::uint64_t stream, const std::string& out) {
  CompetitionTree tree = tree_from_json(slurp(tree_path));
  InclusionProbabilities probs = load_probs(probs_path);
  RngState rng{seed, stream, 0};
  write_sample_csv(out, pivotal_sample(tree, probs, rng));
  return 0;
}

int run_fit(const std::string& a_path, const std::string& b_path,
            const std::string& sample_path, const std::string& out) {
  Matrix a = read_matrix_csv(a_path);
  Vector b = read_vector_csv(b_path);
  SampleSet sample = read_sample_csv(sample_path);
  auto [sa, sb] = subsample_system(a, b, sample);
  RegressionSolution fit = weighted_least_squares(sa, sb);
  if (fit.rank_deficient)
    std::cerr << "warning: subsampled system is rank deficient (rank "
              << fit.effective_rank << "); wrote the minimum-norm solution\n";
  write_vector_csv(out, fit.coefficients);
  return 0;
}

int run_verify(Index n, Index k, const std::string& tree_kind, const std::string& probs_kind,
               std::uint64_t seed, Index max_conditioning, bool full_sweep) {
  if (n < 2 || n > 14) throw TooLarge("verify: enumeration supports 2 <= n <= 14");
  if (full_sweep && n > 8)
    throw TooLarge("verify: the full conditioning sweep is limited to n <= 8");
  RngState rng{seed, 0, 0};

  InclusionProbabilities probs;
  if (probs_kind == "equal") {
    if (k < 1 || k > n) throw InfeasibleK("verify: need 1 <= k <= n");
    probs.probs = Vector::Constant(n, static_cast<Real>(k) / static_cast<Real>(n));
    probs.k = k;
  } else if (probs_kind == "random") {
    Vector u(n);
    KahanSum total;
    for (Index i = 0; i < n; ++i) {
      u(i) = 0.05 + rng.next_double();
      total.add(u(i));
    }
    probs = probability_ceiling(u * (static_cast<Real>(k) / total.value()), k);
  } else {
    throw BadInput("verify: probs must be equal or random, got '" + probs_kind + "'");
  }

  CompetitionTree tree;
  if (tree_kind == "random") {
    tree = random_tree(probs, rng);
  } else if (tree_kind == "coordinate" || tree_kind == "pca") {
    Matrix x(n, 2);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < 2; ++c) x(i, c) = 2.0 * rng.next_double() - 1.0;
    tree = build_tree(x, probs,
                      tree_kind == "pca" ? SplitMethod::pca : SplitMethod::coordinate);
  } else {
    throw BadInput("verify: tree must be random, coordinate or pca");
  }

  SampleDistribution dist = enumerate_pivotal(tree, probs);
  Vector marginal_err = dist.marginals() - probs.probs;
  nlohmann::json report{
      {"schema_version", 1},
      {"n", n},
      {"k", probs.k},
      {"marginal_max_abs_err", marginal_err.lpNorm<Eigen::Infinity>()},
      {"homogeneous", dist.homogeneous()},
      {"d_inf", d_inf(dist, full_sweep ? n : std::min<Index>(max_conditioning, n))},
      {"negative_correlation_violations", negative_correlation_violations(dist)}};
  std::cout << report.dump() << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& outdir,
                       bool seed_set, std::uint64_t seed, Index threads, Index trials,
                       const std::string& label_cache) {
  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(slurp(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw BadInput(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig cfg = ExperimentConfig::from_json(raw.dump());
  if (seed_set)
    cfg.seed = seed;
  else if (!raw.contains("seed"))
    throw BadInput("experiment: config has no seed; pass --seed");
  if (threads >= 0) cfg.threads = threads;
  if (trials >= 1) cfg.trials = trials;

  std::filesystem::create_directories(outdir);
  std::string trials_path = (std::filesystem::path(outdir) / "trials.csv").string();
  std::string summary_path = (std::filesystem::path(outdir) / "summary.csv").string();
  auto flush = [&](const ExperimentResult& partial) {
    write_trials_csv(trials_path, partial);
    write_summary_csv(summary_path, partial);
  };
  ExperimentResult result = run_experiment(cfg, label_cache, flush);
  flush(result);
  return 0;
}

int run_continuum(Index degree, Index k, std::uint64_t seed, Real lo, Real hi,
                  const std::string& out, const std::string& partition_out) {
  LeverageDensity density{degree, lo, hi};
  Vector bounds = build_partition(density, k);
  if (!partition_out.empty()) write_vector_csv(partition_out, bounds);
  RngState rng{seed, 0, 0};
  write_vector_csv(out, sample_continuum(density, bounds, rng));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leverage-score pivotal sampling toolkit"};
  app.require_subcommand(1);

  auto* levscores = app.add_subcommand("levscores", "Row leverage scores of a matrix");
  std::string lev_in, lev_out;
  levscores->add_option("--in", lev_in, "Design matrix CSV")->required();
  levscores->add_option("--out", lev_out, "Output CSV (default: stdout)");

  auto* tree_cmd = app.add_subcommand("tree", "Build a competition tree over points");
  std::string tree_x, tree_probs, tree_method = "pca", tree_out;
  tree_cmd->add_option("--x", tree_x, "Point coordinates CSV")->required();
  tree_cmd->add_option("--probs", tree_probs, "Inclusion probabilities CSV")->required();
  tree_cmd->add_option("--method", tree_method, "Split method: pca or coordinate");
  tree_cmd->add_option("--out", tree_out, "Output tree JSON")->required();

  auto* sample_cmd = app.add_subcommand("sample", "Draw one pivotal sample");
  std::string sample_tree, sample_probs, sample_out;
  std::uint64_t sample_seed = 0, sample_stream = 0;
  sample_cmd->add_option("--tree", sample_tree, "Tree JSON")->required();
  sample_cmd->add_option("--probs", sample_probs, "Inclusion probabilities CSV")->required();
  sample_cmd->add_option("--seed", sample_seed, "RNG seed")->required();
  sample_cmd->add_option("--stream", sample_stream, "RNG stream (default 0)");
  sample_cmd->add_option("--out", sample_out, "Output sample CSV")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Weighted least squares on a sample");
  std::string fit_a, fit_b, fit_sample, fit_out;
  fit_cmd->add_option("--a", fit_a, "Design matrix CSV")->required();
  fit_cmd->add_option("--b", fit_b, "Target vector CSV")->required();
  fit_cmd->add_option("--sample", fit_sample, "Sample CSV (index,weight)")->required();
  fit_cmd->add_option("--out", fit_out, "Output coefficients CSV")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Enumerate a pivotal distribution");
  Index verify_n = 6, verify_k = 3, verify_maxcond = 3;
  std::string verify_tree = "random", verify_probs = "equal";
  std::uint64_t verify_seed = 0;
  bool verify_full = false;
  verify_cmd->add_option("--n", verify_n, "Row count (2..14)")->required();
  verify_cmd->add_option("--k", verify_k, "Target sample size")->required();
  verify_cmd->add_option("--tree", verify_tree, "Tree shape: random, coordinate or pca");
  verify_cmd->add_option("--probs", verify_probs, "Probabilities: equal or random");
  verify_cmd->add_option("--seed", verify_seed, "RNG seed")->required();
  verify_cmd->add_option("--max-conditioning", verify_maxcond,
                         "Conditioning-set size cap (default 3)");
  verify_cmd->add_flag("--full-sweep", verify_full, "Sweep all conditioning sets (n <= 8)");

  auto* exp_cmd = app.add_subcommand("experiment", "Run a sampling experiment");
  std::string exp_config, exp_outdir, exp_cache;
  std::uint64_t exp_seed = 0;
  Index exp_threads = -1, exp_trials = 0;
  exp_cmd->add_option("--config", exp_config, "Experiment config JSON")->required();
  exp_cmd->add_option("--outdir", exp_outdir, "Directory for trials.csv / summary.csv")
      ->required();
  auto* exp_seed_opt = exp_cmd->add_option("--seed", exp_seed, "Override config seed");
  exp_cmd->add_option("--threads", exp_threads, "Worker threads (0: all cores)");
  exp_cmd->add_option("--trials", exp_trials, "Override config trial count");
  exp_cmd->add_option("--labels-cache", exp_cache, "CSV file to reuse (X, b) labels");

  auto* cont_cmd = app.add_subcommand("continuum", "Interval pivotal sample");
  Index cont_degree = 3, cont_k = 10;
  std::uint64_t cont_seed = 0;
  Real cont_lo = -1.0, cont_hi = 1.0;
  std::string cont_out, cont_partition;
  cont_cmd->add_option("--degree", cont_degree, "Polynomial degree")->required();
  cont_cmd->add_option("--k", cont_k, "Number of cells / points")->required();
  cont_cmd->add_option("--seed", cont_seed, "RNG seed")->required();
  cont_cmd->add_option("--lo", cont_lo, "Interval start (default -1)");
  cont_cmd->add_option("--hi", cont_hi, "Interval end (default 1)");
  cont_cmd->add_option("--out", cont_out, "Output points CSV")->required();
  cont_cmd->add_option("--partition-out", cont_partition, "Optional boundaries CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (levscores->parsed()) return run_levscores(lev_in, lev_out);
    if (tree_cmd->parsed()) return run_tree(tree_x, tree_probs, tree_method, tree_out);
    if (sample_cmd->parsed())
      return run_sample(sample_tree, sample_probs, sample_seed, sample_stream, sample_out);
    if (fit_cmd->parsed()) return run_fit(fit_a, fit_b, fit_sample, fit_out);
    if (verify_cmd->parsed())
      return run_verify(verify_n, verify_k, verify_tree, verify_probs, verify_seed,
                        verify_maxcond, verify_full);
    if (exp_cmd->parsed())
      return run_experiment_cmd(exp_config, exp_outdir, exp_seed_opt->count() > 0, exp_seed,
                                exp_threads, exp_trials, exp_cache);
    if (cont_cmd->parsed())
      return run_continuum(cont_degree, cont_k, cont_seed, cont_lo, cont_hi, cont_out,
                           cont_partition);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
