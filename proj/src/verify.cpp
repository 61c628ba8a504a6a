#include "actreg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "actreg/errors.hpp"
#include "actreg/linalg.hpp"

namespace actreg {

Vector SampleDistribution::marginals() const {
  Vector m = Vector::Zero(n);
  for (const auto& [set, prob] : outcomes)
    for (Index i : set) m(i) += prob;
  return m;
}

bool SampleDistribution::homogeneous() const {
  if (outcomes.empty()) return true;
  std::size_t k = outcomes.front().first.size();
  for (const auto& [set, prob] : outcomes)
    if (set.size() != k) return false;
  return true;
}

namespace {

// A partially resolved branch: which rows are already selected, which row
// survives with what carried mass, and the branch probability.
struct Branch {
  std::uint32_t selected;
  std::int32_t survivor;
  Real mass;
  Real prob;
};

using BranchTable = std::map<std::pair<std::uint32_t, std::int32_t>, Branch>;

void merge_into(BranchTable& table, const Branch& b) {
  if (b.prob <= 0.0) return;
  auto key = std::make_pair(b.selected, b.survivor);
  auto [it, fresh] = table.try_emplace(key, b);
  if (!fresh) it->second.prob += b.prob;
}

std::vector<Branch> resolve(const CompetitionTree& tree, const Vector& p, std::int32_t ref,
                            MatchOrder order) {
  if (tree.is_leaf(ref)) {
    auto row = tree.leaf_row(ref);
    return {Branch{0u, row, p(row), 1.0}};
  }
  std::int32_t first = tree.nodes[ref].left;
  std::int32_t second = tree.nodes[ref].right;
  if (order == MatchOrder::right_first) std::swap(first, second);
  std::vector<Branch> lhs = resolve(tree, p, first, order);
  std::vector<Branch> rhs = resolve(tree, p, second, order);

  BranchTable table;
  for (const Branch& a : lhs) {
    for (const Branch& b : rhs) {
      std::uint32_t sel = a.selected | b.selected;
      Real base = a.prob * b.prob;
      Real s = a.mass + b.mass;
      if (s <= 1.0) {
        Real pa = s > 0.0 ? a.mass / s : 0.5;
        merge_into(table, {sel, a.survivor, s, base * pa});
        merge_into(table, {sel, b.survivor, s, base * (1.0 - pa)});
      } else {
        Real den = 2.0 - s;
        Real pa = den > 1e-12 ? (1.0 - a.mass) / den : 0.5;
        merge_into(table, {sel | (1u << b.survivor), a.survivor, s - 1.0, base * pa});
        merge_into(table, {sel | (1u << a.survivor), b.survivor, s - 1.0,
                           base * (1.0 - pa)});
      }
    }
  }
  std::vector<Branch> out;
  out.reserve(table.size());
  for (auto& [key, b] : table) out.push_back(b);
  return out;
}

}  // namespace

SampleDistribution enumerate_pivotal(const CompetitionTree& tree,
                                     const InclusionProbabilities& probs,
                                     MatchOrder order) {
  const Vector& p = probs.probs;
  if (p.size() > 32) throw TooLarge("enumerate_pivotal: row count above bitmask capacity");
  if (tree.leaf_count() > 14)
    throw TooLarge("enumerate_pivotal: " + std::to_string(tree.leaf_count()) +
                   " leaves exceed the enumeration cap of 14");
  for (Index i = 0; i < p.size(); ++i)
    if (!(p(i) > 0.0) || p(i) > 1.0)
      throw BadInput("enumerate_pivotal: probabilities must lie in (0, 1]");
  {
    std::vector<std::int32_t> expect;
    for (Index i = 0; i < p.size(); ++i)
      if (p(i) < 1.0) expect.push_back(static_cast<std::int32_t>(i));
    if (tree.sorted_rows() != expect)
      throw BadInput("enumerate_pivotal: tree leaves differ from the rows with p < 1");
  }
  KahanSum fractional;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) < 1.0) fractional.add(p(i));
  if (std::abs(fractional.value() - std::round(fractional.value())) > 1e-6)
    throw NonIntegerMass("enumerate_pivotal: fractional mass " +
                         std::to_string(fractional.value()));

  std::uint32_t always = 0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) >= 1.0) always |= (1u << i);

  // Root residual within 1e-9 of 0/1 is treated as exact; the sampler's
  // tie-break coin deviates from this with probability at most 1e-9.
  std::map<std::uint32_t, std::vector<Real>> merged;
  for (const Branch& b : resolve(tree, p, tree.root, order)) {
    std::uint32_t sel = b.selected | always;
    if (b.mass >= 1.0 - 1e-9)
      sel |= (1u << b.survivor);
    else if (b.mass > 1e-9)
      throw NonIntegerMass("enumerate_pivotal: root residual mass " + std::to_string(b.mass));
    merged[sel].push_back(b.prob);
  }

  SampleDistribution dist;
  dist.n = p.size();
  for (auto& [mask, probs_for_set] : merged) {
    // Ascending-magnitude accumulation keeps the merge error near eps.
    std::sort(probs_for_set.begin(), probs_for_set.end());
    KahanSum total;
    for (Real q : probs_for_set) total.add(q);
    std::vector<Index> set;
    for (Index i = 0; i < dist.n; ++i)
      if (mask & (1u << i)) set.push_back(i);
    dist.outcomes.emplace_back(std::move(set), total.value());
  }
  return dist;
}

SampleDistribution enumerate_bernoulli(const Vector& probs) {
  const Index n = probs.size();
  if (n > 20) throw TooLarge("enumerate_bernoulli: 2^n outcome table too large");
  for (Index i = 0; i < n; ++i)
    if (probs(i) < 0.0 || probs(i) > 1.0)
      throw BadInput("enumerate_bernoulli: probabilities must lie in [0, 1]");
  SampleDistribution dist;
  dist.n = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Real prob = 1.0;
    std::vector<Index> set;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        prob *= probs(i);
        set.push_back(i);
      } else {
        prob *= 1.0 - probs(i);
      }
    }
    if (prob > 0.0) dist.outcomes.emplace_back(std::move(set), prob);
  }
  return dist;
}

namespace {

struct MaskTable {
  std::vector<std::uint32_t> masks;
  std::vector<Real> probs;

  explicit MaskTable(const SampleDistribution& dist) {
    masks.reserve(dist.outcomes.size());
    probs.reserve(dist.outcomes.size());
    for (const auto& [set, prob] : dist.outcomes) {
      std::uint32_t m = 0;
      for (Index i : set) m |= (1u << i);
      masks.push_back(m);
      probs.push_back(prob);
    }
  }

  // Pr[all of `require` selected].
  Real containing(std::uint32_t require) const {
    Real acc = 0.0;
    for (std::size_t t = 0; t < masks.size(); ++t)
      if ((masks[t] & require) == require) acc += probs[t];
    return acc;
  }

  // Conditional marginals q_j = Pr[xi_j | all of `require`].
  Vector conditional_marginals(std::uint32_t require, Index n, Real p_require) const {
    Vector q = Vector::Zero(n);
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if ((masks[t] & require) != require) continue;
      for (Index j = 0; j < n; ++j)
        if (masks[t] & (1u << j)) q(j) += probs[t];
    }
    return q / p_require;
  }
};

std::uint32_t set_mask(const std::vector<Index>& s, Index n) {
  std::uint32_t m = 0;
  for (Index i : s) {
    if (i < 0 || i >= n)
      throw IndexOutOfRange("conditioning index " + std::to_string(i) + " outside [0, " +
                            std::to_string(n) + ")");
    m |= (1u << i);
  }
  return m;
}

InfluenceReport influence_from_table(const MaskTable& table, Index n,
                                     const std::vector<Index>& s) {
  std::uint32_t smask = set_mask(s, n);
  Real ps = table.containing(smask);
  if (ps <= 0.0)
    throw ImpossibleCondition("influence_report: conditioning event has probability 0");
  Vector q = table.conditional_marginals(smask, n, ps);

  InfluenceReport report;
  report.conditioning_set = s;
  report.influence = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (smask & (1u << i)) continue;
    std::uint32_t imask = smask | (1u << i);
    Real psi = table.containing(imask);
    if (psi <= 0.0) continue;  // conditioning on xi_i infeasible
    Vector qi = table.conditional_marginals(imask, n, psi);
    Real row = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (smask & (1u << j)) continue;
      Real inf = qi(j) - q(j);
      report.influence(i, j) = inf;
      row += std::abs(inf);
    }
    report.inf_norm = std::max(report.inf_norm, row);
  }
  return report;
}

}  // namespace

InfluenceReport influence_report(const SampleDistribution& dist, const std::vector<Index>& s) {
  if (dist.n > 32) throw TooLarge("influence_report: row count above bitmask capacity");
  return influence_from_table(MaskTable(dist), dist.n, s);
}

Real d_inf(const SampleDistribution& dist, Index max_conditioning) {
  if (dist.n > 32) throw TooLarge("d_inf: row count above bitmask capacity");
  MaskTable table(dist);
  Real worst = 0.0;
  std::vector<Index> s;
  std::function<void(Index)> sweep = [&](Index next) {
    try {
      worst = std::max(worst, influence_from_table(table, dist.n, s).inf_norm);
    } catch (const ImpossibleCondition&) {
      // infeasible conditioning sets are skipped
    }
    if (static_cast<Index>(s.size()) >= max_conditioning) return;
    for (Index i = next; i < dist.n; ++i) {
      s.push_back(i);
      sweep(i + 1);
      s.pop_back();
    }
  };
  sweep(0);
  return worst;
}

Index negative_correlation_violations(const SampleDistribution& dist) {
  if (dist.n > 32) throw TooLarge("row count above bitmask capacity");
  MaskTable table(dist);
  Vector p = dist.marginals();
  Index violations = 0;
  for (Index i = 0; i < dist.n; ++i)
    for (Index j = i + 1; j < dist.n; ++j) {
      Real joint = table.containing((1u << i) | (1u << j));
      if (joint > p(i) * p(j) + 1e-12) ++violations;
    }
  return violations;
}

Real embedding_deviation(const Matrix& u, const SampleSet& s) {
  Matrix su = subsample_system(u, Vector::Zero(u.rows()), s).first;
  return spectral_deviation_from_identity(su.transpose() * su);
}

Real matvec_error(const Matrix& u, const Vector& residual, const SampleSet& s) {
  if (u.rows() != residual.size())
    throw DimensionMismatch("matvec_error: " + std::to_string(u.rows()) + " rows vs " +
                            std::to_string(residual.size()) + " residual entries");
  Real rnorm = residual.norm();
  if (rnorm == 0.0) return 0.0;
  if ((u.transpose() * residual).norm() > 1e-8 * rnorm)
    throw NotAResidual("matvec_error: residual is not orthogonal to the column span");
  Vector acc = Vector::Zero(u.cols());
  for (std::size_t j = 0; j < s.indices.size(); ++j) {
    Index i = s.indices[j];
    if (i < 0 || i >= u.rows())
      throw IndexOutOfRange("matvec_error: sample row " + std::to_string(i));
    Real w2 = s.weights(static_cast<Index>(j)) * s.weights(static_cast<Index>(j));
    acc += w2 * residual(i) * u.row(i).transpose();
  }
  return acc.squaredNorm() / (rnorm * rnorm);
}

}  // namespace actreg
