#include "actreg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "actreg/csv.hpp"
#include "actreg/errors.hpp"

namespace actreg {

namespace {

void validate_probs(const InclusionProbabilities& probs) {
  for (Index i = 0; i < probs.probs.size(); ++i) {
    Real p = probs.probs(i);
    if (!(p > 0.0) || p > 1.0)
      throw BadInput("inclusion probability " + std::to_string(p) + " at row " +
                     std::to_string(i) + " is outside (0, 1]");
  }
}

Vector weights_for(const Vector& p, const std::vector<Index>& indices) {
  Vector w(static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j)
    w(static_cast<Index>(j)) = 1.0 / std::sqrt(p(indices[j]));
  return w;
}

struct Competitor {
  Index row;
  Real mass;
};

}  // namespace

SampleSet pivotal_sample(const CompetitionTree& tree, const InclusionProbabilities& probs,
                         RngState& rng) {
  validate_probs(probs);
  const Vector& p = probs.probs;

  std::vector<Index> selected;
  KahanSum fractional;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) >= 1.0)
      selected.push_back(i);
    else
      fractional.add(p(i));
  }
  {
    std::vector<std::int32_t> expect;
    expect.reserve(p.size() - selected.size());
    for (Index i = 0; i < p.size(); ++i)
      if (p(i) < 1.0) expect.push_back(static_cast<std::int32_t>(i));
    if (tree.sorted_rows() != expect)
      throw BadInput("pivotal_sample: tree leaves differ from the rows with p < 1");
  }
  Real mass = fractional.value();
  if (std::abs(mass - std::round(mass)) > 1e-6)
    throw NonIntegerMass("pivotal_sample: fractional mass " + std::to_string(mass) +
                         " is not close to an integer");

  // Post-order resolve: each internal node plays one match between the
  // survivors of its subtrees.
  std::function<Competitor(std::int32_t)> resolve = [&](std::int32_t ref) -> Competitor {
    if (tree.is_leaf(ref)) {
      Index row = tree.leaf_row(ref);
      return {row, p(row)};
    }
    Competitor a = resolve(tree.nodes[ref].left);
    Competitor b = resolve(tree.nodes[ref].right);
    Real s = a.mass + b.mass;
    Real u = rng.next_double();
    if (s <= 1.0) {
      // Winner absorbs both masses, loser is out.  Degenerate 0/0 keeps
      // the draw consumed so replay stays aligned with the structure.
      Real pa = s > 0.0 ? a.mass / s : 0.5;
      return (u < pa) ? Competitor{a.row, s} : Competitor{b.row, s};
    }
    // One of the two is selected now; the other keeps the excess s - 1.
    Real den = 2.0 - s;
    Real pa = den > 1e-12 ? (1.0 - a.mass) / den : 0.5;
    if (u < pa) {
      selected.push_back(b.row);
      return {a.row, s - 1.0};
    }
    selected.push_back(a.row);
    return {b.row, s - 1.0};
  };

  Competitor last = resolve(tree.root);
  if (last.mass >= 1.0) {
    selected.push_back(last.row);
  } else if (last.mass > 0.0) {
    if (last.mass > 1e-9 && last.mass < 1.0 - 1e-9)
      throw NonIntegerMass("pivotal_sample: root residual mass " + std::to_string(last.mass));
    if (rng.next_double() < last.mass) selected.push_back(last.row);
  }

  std::sort(selected.begin(), selected.end());
  SampleSet out;
  out.indices = std::move(selected);
  out.weights = weights_for(p, out.indices);
  out.k = static_cast<Index>(std::llround(fractional.value())) +
          (p.array() >= 1.0).count();
  return out;
}

SampleSet bernoulli_sample(const InclusionProbabilities& probs, RngState& rng) {
  validate_probs(probs);
  const Vector& p = probs.probs;
  SampleSet out;
  KahanSum total;
  for (Index i = 0; i < p.size(); ++i) {
    total.add(p(i));
    if (rng.next_double() < p(i)) out.indices.push_back(i);
  }
  out.weights = weights_for(p, out.indices);
  out.k = static_cast<Index>(std::llround(total.value()));
  return out;
}

SampleSet uniform_sample(Index n, Index k, RngState& rng) {
  if (n < 1) throw BadInput("uniform_sample: n must be positive");
  if (k < 1 || k > n)
    throw InfeasibleK("uniform_sample: k = " + std::to_string(k) + " with n = " +
                      std::to_string(n));
  std::vector<Index> pool(n);
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    Index j = i + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
    std::swap(pool[i], pool[j]);
  }
  SampleSet out;
  out.indices.assign(pool.begin(), pool.begin() + k);
  std::sort(out.indices.begin(), out.indices.end());
  out.weights = Vector::Constant(k, std::sqrt(static_cast<Real>(n) / static_cast<Real>(k)));
  out.k = k;
  return out;
}

std::pair<Matrix, Vector> subsample_system(const Matrix& a, const Vector& b,
                                           const SampleSet& s) {
  if (a.rows() != b.size())
    throw DimensionMismatch("subsample_system: " + std::to_string(a.rows()) + " rows vs " +
                            std::to_string(b.size()) + " targets");
  if (static_cast<Index>(s.indices.size()) != s.weights.size())
    throw DimensionMismatch("subsample_system: sample indices and weights disagree");
  Matrix sa(static_cast<Index>(s.indices.size()), a.cols());
  Vector sb(static_cast<Index>(s.indices.size()));
  for (std::size_t j = 0; j < s.indices.size(); ++j) {
    Index i = s.indices[j];
    if (i < 0 || i >= a.rows())
      throw IndexOutOfRange("subsample_system: row " + std::to_string(i) + " outside [0, " +
                            std::to_string(a.rows()) + ")");
    auto r = static_cast<Index>(j);
    sa.row(r) = s.weights(r) * a.row(i);
    sb(r) = s.weights(r) * b(i);
  }
  return {std::move(sa), std::move(sb)};
}

void write_sample_csv(const std::string& path, const SampleSet& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "index,weight\n";
  for (std::size_t j = 0; j < s.indices.size(); ++j)
    out << s.indices[j] << ',' << format_real(s.weights(static_cast<Index>(j))) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

SampleSet read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  SampleSet s;
  std::vector<Real> weights;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineNo == 1 && line.rfind("index", 0) == 0) continue;
    std::istringstream ss(line);
    std::string f0, f1;
    if (!std::getline(ss, f0, ',') || !std::getline(ss, f1))
      throw IoError(path + ":" + std::to_string(lineNo) + ": expected 'index,weight'");
    try {
      s.indices.push_back(std::stoll(f0));
      weights.push_back(std::stod(f1));
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineNo) + ": malformed sample row");
    }
  }
  if (s.indices.empty()) throw IoError("'" + path + "' contains no sample rows");
  s.weights = Eigen::Map<Vector>(weights.data(), static_cast<Index>(weights.size()));
  s.k = static_cast<Index>(s.indices.size());
  return s;
}

}  // namespace actreg
