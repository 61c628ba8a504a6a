#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actreg/problems.hpp"
#include "actreg/types.hpp"

namespace actreg {

enum class SamplerKind { pivotal_pca, pivotal_coordinate, bernoulli, uniform, chebyshev_grid };

SamplerKind sampler_from_name(const std::string& name);
std::string sampler_name(SamplerKind kind);

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::oscillator2d;
  Index n = 10000;
  Index degree = 12;
  std::vector<SamplerKind> samplers = {SamplerKind::pivotal_pca, SamplerKind::bernoulli};
  std::vector<Index> k_values;  // empty: geometric sweep, ratio 1.15, from
                                // the feature count up to n/10
  Index trials = 200;
  std::uint64_t seed = 0;
  bool grid = false;    // oscillator3d fixed tensor grid instead of draws
  Index threads = 0;    // 0: all available cores

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
};

// One sampler's error curve.  errors(i, t) is the full-data relative
// error of trial t at k_values[i]; sample_sizes and labels_used record
// the realized sample and the distinct labels the fit requested (these
// match: a trial only ever asks for its own sample's labels).
struct SamplerCurve {
  SamplerKind sampler = SamplerKind::pivotal_pca;
  std::vector<Index> k_values;
  Matrix errors;
  Matrix sample_sizes;
  Matrix labels_used;
  Vector medians;
};

struct ExperimentResult {
  ExperimentConfig cfg;  // with the resolved k sweep
  Real opt_error = 0.0;
  std::vector<SamplerCurve> curves;
};

// Full protocol: draw the point cloud, expand features on the
// [-1,1]-scaled coordinates, compute leverage probabilities per k, build
// the competition tree from the scaled raw coordinates (not features),
// then per trial sample, solve weighted least squares, and score
// ||A x~ - b||^2 / ||b||^2 against the full-data optimum.  Labels are
// evaluated lazily and shared across trials; label_cache (optional CSV
// path) persists raw (X, b) pairs across runs.  on_progress, when set,
// receives the partially filled result after every completed (sampler, k)
// block, so callers can flush partial output if a later stage throws.
ExperimentResult run_experiment(
    const ExperimentConfig& cfg, const std::string& label_cache = "",
    const std::function<void(const ExperimentResult&)>& on_progress = {});

// Smallest (interpolated) k whose median error reaches multiple * OPT,
// per sampler, plus the pivotal/Bernoulli efficiency ratio when both are
// present.  Realizable targets (OPT <= 1e-12) switch to an absolute
// threshold of 1e-10.  Throws TargetNotReached when a curve never
// crosses the threshold.
struct TargetTable {
  Real multiple = 0.0;
  Real threshold = 0.0;
  std::vector<std::pair<SamplerKind, Real>> k_star;
  std::optional<Real> efficiency;  // pivotal / Bernoulli
};
TargetTable samples_to_target(const ExperimentResult& result, Real multiple);

// CSV emission: per-trial rows "sampler,k,trial,relative_error" and the
// summary "sampler,k,median_error,opt_error".
void write_trials_csv(const std::string& path, const ExperimentResult& result);
void write_summary_csv(const std::string& path, const ExperimentResult& result);

// Default sweep used when k_values is empty.
std::vector<Index> default_k_sweep(Index feature_count, Index n);

}  // namespace actreg
