#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace actreg {

using Real = double;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Compensated (Neumaier) accumulator.  Used wherever a sum feeds a
// tolerance tighter than ~n*eps*max|x|, e.g. probability mass checks.
class KahanSum {
 public:
  void add(Real x) {
    Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = 0.0;
  Real comp_ = 0.0;
};

}  // namespace actreg
