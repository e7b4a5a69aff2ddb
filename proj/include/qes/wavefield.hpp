#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qes/core.hpp"
#include "qes/errors.hpp"

namespace qes {

/// Maximum of W on the left half-axis. All exponentials are taken relative
/// to it: exp(W - w_ref) <= 1 on x <= 0, so psi never overflows even when
/// the exponent has a large interior hump.
inline double w_ref(const ExponentParams& p) {
  double best = 0.0;  // W(0) = 0
  double disc = p.a * p.a - p.b;
  if (disc >= 0.0) {
    double root = std::sqrt(disc);
    for (double x : {-p.a + root, -p.a - root})
      if (x <= 0.0) best = std::max(best, w_eval(p, x));
  }
  return best;
}

namespace detail {

// Raw left-branch value P(x) exp(W(x) - w_ref), without the norm factor.
inline double psi_raw_left(const QesSolution& s, double x, double wref) {
  return poly_eval(s.v, x) * std::exp(w_eval(s.params, x) - wref);
}

inline double parity_sign(const QesSolution& s) {
  return s.problem.parity == Parity::Even ? 1.0 : -1.0;
}

}  // namespace detail

/// Normalized wave function. x > 0 is evaluated by reflection, so the
/// parity symmetry holds bit-exactly.
inline double psi_eval(const QesSolution& s, double x) {
  double wref = w_ref(s.params);
  if (x > 0.0) return detail::parity_sign(s) * s.norm * detail::psi_raw_left(s, -x, wref);
  return s.norm * detail::psi_raw_left(s, x, wref);
}

/// d(psi)/dx; the left-side limit is used at x = 0.
inline double psi_prime_eval(const QesSolution& s, double x) {
  double wref = w_ref(s.params);
  double sign = 1.0;
  if (x > 0.0) {
    sign = -detail::parity_sign(s);
    x = -x;
  }
  double dp = poly_eval(poly_derive(s.v), x) + w_prime(s.params, x) * poly_eval(s.v, x);
  return sign * s.norm * dp * std::exp(w_eval(s.params, x) - wref);
}

/// Composite Simpson of f over [-half_width, half_width] with `intervals`
/// even subintervals.
template <typename F>
double simpson(F&& f, double half_width, int intervals) {
  double h = 2.0 * half_width / intervals;
  double acc = f(-half_width) + f(half_width);
  for (int i = 1; i < intervals; ++i) {
    double x = -half_width + i * h;
    acc += f(x) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

/// Computes the constant c with integral of (c psi_raw)^2 over [-L, L]
/// equal to 1 and stores it into the solution. Simpson at `points` and
/// 2*points subintervals, Richardson-combined; the h^4 error term from the
/// derivative kink at the origin cancels, which the plain rule would leave
/// at the 1e-10 level.
inline double normalize(QesSolution& s, double half_width = 8.0, int points = 4000) {
  if (half_width < 6.0) throw std::invalid_argument("normalize: half_width must be >= 6");
  if (points < 2 || points % 2 != 0)
    throw std::invalid_argument("normalize: points must be even and >= 2");
  double wref = w_ref(s.params);
  auto f = [&](double x) {
    double raw = x > 0.0 ? detail::psi_raw_left(s, -x, wref) : detail::psi_raw_left(s, x, wref);
    return raw * raw;
  };
  double coarse = simpson(f, half_width, points);
  double fine = simpson(f, half_width, 2 * points);
  double integral = fine + (fine - coarse) / 15.0;
  if (!std::isfinite(integral) || integral <= 0.0)
    throw NonFinite("normalize: non-finite or non-positive norm integral");
  s.norm = 1.0 / std::sqrt(integral);
  return s.norm;
}

/// Counts strict sign changes of psi on a fine symmetric grid. Samples with
/// |psi| < 1e-12 max|psi| are zero candidates resolved by the neighboring
/// signs; an interior zero run wider than `plateau_limit` cells cannot be
/// resolved and raises AmbiguousNode. For odd parity the zero at the origin
/// counts as one node.
inline int count_nodes(const QesSolution& s, double half_width = 6.0, int points = 4001,
                       int plateau_limit = 3) {
  std::vector<double> vals(points);
  double peak = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = -half_width + 2.0 * half_width * i / (points - 1);
    vals[i] = psi_eval(s, x);
    peak = std::max(peak, std::abs(vals[i]));
  }
  double thr = 1e-12 * peak;
  int nodes = 0;
  int prev_sign = 0;
  int run = 0;  // current interior zero-run length
  for (int i = 0; i < points; ++i) {
    int sgn = std::abs(vals[i]) <= thr ? 0 : (vals[i] > 0.0 ? 1 : -1);
    if (sgn == 0) {
      if (prev_sign != 0) ++run;
      continue;
    }
    if (prev_sign != 0) {
      if (run > plateau_limit)
        throw AmbiguousNode("count_nodes: near-zero plateau of " + std::to_string(run) +
                            " cells");
      if (sgn != prev_sign) ++nodes;
    }
    prev_sign = sgn;
    run = 0;
  }
  return nodes;
}

/// Plot-ready columns over a uniform grid.
struct SampleTable {
  std::vector<double> xs;
  std::vector<double> potential;
  std::vector<double> psi;
  std::vector<double> psi_prime;
};

inline SampleTable sample(const QesSolution& s, double x_min, double x_max, int count) {
  if (!(x_min < x_max) || count < 2)
    throw std::invalid_argument("sample: need x_min < x_max and count >= 2");
  SampleTable t;
  t.xs.resize(count);
  t.potential.resize(count);
  t.psi.resize(count);
  t.psi_prime.resize(count);
  for (int i = 0; i < count; ++i) {
    double x = x_min + (x_max - x_min) * i / (count - 1);
    t.xs[i] = x;
    t.potential[i] = potential_eval(s.coeffs, x);
    t.psi[i] = psi_eval(s, x);
    t.psi_prime[i] = psi_prime_eval(s, x);
  }
  return t;
}

}  // namespace qes
