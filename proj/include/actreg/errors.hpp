#pragma once

#include <stdexcept>
#include <string>

#include "actreg/types.hpp"

namespace actreg {

// Base class for every error thrown by this library.  The CLI maps any
// Error to exit code 2; catching the concrete type recovers the cause.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& what, Index effective_rank)
      : Error(what), effective_rank(effective_rank) {}
  Index effective_rank;
};

class InfeasibleK : public Error {
 public:
  using Error::Error;
};

class BadInput : public Error {
 public:
  using Error::Error;
};

class EmptyTree : public Error {
 public:
  using Error::Error;
};

class NonIntegerMass : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class ImpossibleCondition : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class ZeroPolynomial : public Error {
 public:
  using Error::Error;
};

class SolverDiverged : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotAResidual : public Error {
 public:
  using Error::Error;
};

class TargetNotReached : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace actreg
