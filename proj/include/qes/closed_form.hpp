#pragma once

#include <cmath>
#include <string>

#include "qes/core.hpp"
#include "qes/errors.hpp"
#include "qes/solve.hpp"

namespace qes {

/// Wave-function coefficient roots of the N = 2 even sector,
/// v = (-2ab + 2 +- 2 sqrt(a^2 b^2 - 2ab + 1 - 2b^3)) / (4b).
/// The root pair solves 2b v^2 + (2ab - 2) v + b^2 = 0; the smaller-magnitude
/// root is recovered from the product b/2 of the pair, which stays accurate
/// when the discriminant nearly cancels (it does at the flagship b = 1).
inline double v_pm(double a, double b, int sign) {
  if (b == 0.0) throw ZeroB("v_pm: b must be nonzero");
  double disc = a * a * b * b - 2.0 * a * b + 1.0 - 2.0 * b * b * b;
  if (disc < 0.0)
    throw ComplexRoot("v_pm: discriminant " + std::to_string(disc) + " < 0");
  double lin = 2.0 * a * b - 2.0;  // quadratic: 2b v^2 + lin v + b^2 = 0
  double sq = 2.0 * std::sqrt(disc);
  if (lin == 0.0) return (sign > 0 ? sq : -sq) / (4.0 * b);
  double sb = lin > 0.0 ? 1.0 : -1.0;
  double qq = -0.5 * (lin + sb * sq);
  // qq / (2b) carries the +- = -sb root; the conjugate is b^2 / (2 qq)... = (b*b) / qq / ...
  return (sign == (sb > 0 ? -1 : 1)) ? qq / (2.0 * b) : (b * b) / (2.0 * qq) * 1.0;
}

/// Exponent coefficient roots of the N = 2 even sector,
/// a = (-7 b^3 - 8 +- 3 sqrt(b^6 - 12 b^3 + 16)) / (20 b), same conjugate
/// treatment as v_pm.
inline double a_pm(double b, int sign) {
  if (b == 0.0) throw ZeroB("a_pm: b must be nonzero");
  double b3 = b * b * b;
  double disc = b3 * b3 - 12.0 * b3 + 16.0;
  if (disc < 0.0)
    throw ComplexRoot("a_pm: discriminant " + std::to_string(disc) + " < 0");
  double lin = 7.0 * b3 + 8.0;  // quadratic: 10b a^2 + lin a + (2b^6 + 11b^3 - 4)/(2b) = 0
  double sq = 3.0 * std::sqrt(disc);
  if (lin == 0.0) return (sign > 0 ? sq : -sq) / (20.0 * b);
  double sb = lin > 0.0 ? 1.0 : -1.0;
  double qq = -0.5 * (lin + sb * sq);
  double constant = (2.0 * b3 * b3 + 11.0 * b3 - 4.0) / (2.0 * b);
  return (sign == (sb > 0 ? -1 : 1)) ? qq / (10.0 * b) : constant / qq;
}

/// E = 2u/v - 10a - b^2 with the even-sector identification u = -b.
inline double energy_n2(double a, double b, double v) {
  if (v == 0.0) throw ZeroV("energy_n2: v must be nonzero");
  return 2.0 * (-b) / v - 10.0 * a - b * b;
}

namespace detail {

inline constexpr double kPairingResidualTol = 1e-10;

}  // namespace detail

/// Assembles the even N = 2 solution for a chosen sign pairing and verifies
/// it against the remaining constraint rows. Not every (sign_v, sign_a)
/// combination solves the full system; inconsistent pairings are rejected
/// by residual instead of being returned as wrong states.
inline QesSolution solution_n2(double b, int sign_v, int sign_a) {
  double a = a_pm(b, sign_a);
  double v2 = v_pm(a, b, sign_v);
  double energy = energy_n2(a, b, v2);
  double p = -energy;

  ExponentParams params{a, b};
  RecurrenceResult rec = propagate_coefficients(params, p, 2, Parity::Even);
  double scale = std::max(1.0, std::abs(v2));
  if (std::abs(rec.v[2] - v2) > 1e-9 * scale ||
      std::max(std::abs(rec.residual_1), std::abs(rec.residual_2)) >
          detail::kPairingResidualTol * (1.0 + std::abs(p)))
    throw InconsistentRoots(
        "solution_n2: sign pairing (" + std::string(sign_v > 0 ? "+" : "-") + "," +
        std::string(sign_a > 0 ? "+" : "-") + ") does not solve the full system at b = " +
        std::to_string(b));

  QesProblem problem{2, Parity::Even, b, 0};
  return assemble_solution(problem, params, p, {1.0, -b, v2});
}

}  // namespace qes
