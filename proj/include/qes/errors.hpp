#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base class for every domain error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration exhausted its budget without meeting the residual
/// tolerance. Carries the last residual pair for diagnostics.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& msg, double r1, double r2)
      : Error(msg + " (residuals " + std::to_string(r1) + ", " +
              std::to_string(r2) + ")"),
        residual_1(r1),
        residual_2(r2) {}
  double residual_1;
  double residual_2;
};

/// The leading polynomial coefficient vanished; the state belongs to a
/// smaller-degree family.
class DegenerateLeadingCoefficient : public Error {
 public:
  using Error::Error;
};

/// A closed-form discriminant is negative: no real root on this branch.
class ComplexRoot : public Error {
 public:
  using Error::Error;
};

/// The closed forms require b != 0.
class ZeroB : public Error {
 public:
  using Error::Error;
};

/// energy_n2 requires v != 0.
class ZeroV : public Error {
 public:
  using Error::Error;
};

/// A closed-form sign pairing does not solve the full constraint system.
class InconsistentRoots : public Error {
 public:
  using Error::Error;
};

/// Coarse scan found no candidate below the threshold.
class EmptyScan : public Error {
 public:
  using Error::Error;
};

/// QR iteration failed to deflate within the sweep budget.
class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// Adjacent grid eigenvalues closer than the bisection resolution.
class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

/// No grid eigenvalue with the requested parity and node count near the
/// candidate energy. Signals a wrongly constructed solution.
class NoMatch : public Error {
 public:
  using Error::Error;
};

/// Non-finite value met during quadrature; the overflow guard failed.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// A near-zero plateau too wide to resolve the sign structure.
class AmbiguousNode : public Error {
 public:
  using Error::Error;
};

}  // namespace qes
