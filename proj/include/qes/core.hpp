#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qes/errors.hpp"

namespace qes {

enum class Parity { Even, Odd };

inline const char* to_string(Parity p) {
  return p == Parity::Even ? "even" : "odd";
}

inline Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  throw std::invalid_argument("parity must be \"even\" or \"odd\", got \"" + s + "\"");
}

/// Exponent polynomial parameters: W(x) = x^3/3 + a x^2 + b x on the left
/// half-axis. The right branch is fixed by W(-x) = W(x).
struct ExponentParams {
  double a = 0.0;
  double b = 0.0;
};

/// Couplings of the left branch q x + r x^2 + s x^3 + x^4 (x < 0); the right
/// branch is the mirror image, so V(0) = 0 and V(-x) = V(x). The absolute
/// form A|x| + B x^2 + C|x|^3 + x^4 is a derived view: rewriting the left
/// branch with |x| = -x flips the odd-power signs.
struct PotentialCoeffs {
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;

  double abs_a() const { return -q; }
  double abs_b() const { return r; }
  double abs_c() const { return -s; }
};

/// Problem selector: polynomial degree N, parity sector, the free family
/// parameter b, and the branch index j of the auxiliary eigenvalue.
struct QesProblem {
  int degree = 2;
  Parity parity = Parity::Even;
  double b = 1.0;
  int branch = 0;
};

/// The (N+1) x (N+1) coefficient matrix M(a,b,N). Only four diagonals are
/// nonzero; they are stored explicitly. A dense copy is produced only for
/// the eigenvalue cross-check.
struct BandedMatrix {
  int size = 0;                 // N+1
  std::vector<double> main;     // M[n][n]     = 4 a n + 2 a + b^2
  std::vector<double> super1;   // M[m][m+1]   = 2 b (m+1)
  std::vector<double> super2;   // M[k][k+2]   = (k+1)(k+2)
  std::vector<double> sub1;     // M[m+1][m]   = -2 (N - m)

  double at(int i, int j) const {
    if (i == j) return main[i];
    if (j == i + 1) return super1[i];
    if (j == i + 2) return super2[i];
    if (i == j + 1) return sub1[j];
    return 0.0;
  }

  std::vector<double> dense() const {
    std::vector<double> out(static_cast<size_t>(size) * size, 0.0);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) out[static_cast<size_t>(i) * size + j] = at(i, j);
    return out;
  }
};

inline double coupling_s(double a) { return 4.0 * a; }

inline double coupling_r(double a, double b) { return 4.0 * a * a + 2.0 * b; }

inline double coupling_q(double a, double b, int degree) {
  return 4.0 * a * b + 2.0 * degree + 2.0;
}

inline PotentialCoeffs couplings_for(const ExponentParams& p, int degree) {
  return {coupling_q(p.a, p.b, degree), coupling_r(p.a, p.b), coupling_s(p.a)};
}

inline BandedMatrix build_matrix(const ExponentParams& p, int degree) {
  if (degree < 0) throw std::invalid_argument("build_matrix: degree must be >= 0");
  BandedMatrix m;
  m.size = degree + 1;
  m.main.resize(m.size);
  m.super1.resize(degree > 0 ? degree : 0);
  m.super2.resize(degree > 1 ? degree - 1 : 0);
  m.sub1.resize(degree > 0 ? degree : 0);
  for (int n = 0; n <= degree; ++n) m.main[n] = 4.0 * p.a * n + 2.0 * p.a + p.b * p.b;
  for (int k = 0; k + 1 <= degree; ++k) m.super1[k] = 2.0 * p.b * (k + 1);
  for (int k = 0; k + 2 <= degree; ++k) m.super2[k] = (k + 1.0) * (k + 2.0);
  for (int k = 0; k + 1 <= degree; ++k) m.sub1[k] = -2.0 * (degree - k);
  return m;
}

/// V at any x. The right branch is evaluated by reflecting onto the left
/// one, which makes the spatial symmetry bit-exact. V(0) = 0 by
/// construction.
inline double potential_eval(const PotentialCoeffs& c, double x) {
  if (x == 0.0) return 0.0;
  if (x > 0.0) x = -x;
  return x * (c.q + x * (c.r + x * (c.s + x)));
}

/// W at any x, reflected like the potential.
inline double w_eval(const ExponentParams& p, double x) {
  if (x > 0.0) x = -x;
  return x * (p.b + x * (p.a + x / 3.0));
}

/// dW/dx; at x = 0 the left-side limit b is returned.
inline double w_prime(const ExponentParams& p, double x) {
  if (x > 0.0) return -(p.b - x * (2.0 * p.a - x));
  return p.b + x * (2.0 * p.a + x);
}

/// d2W/dx2; at x = 0 the left-side limit 2a is returned.
inline double w_second(const ExponentParams& p, double x) {
  if (x > 0.0) x = -x;
  return 2.0 * (p.a + x);
}

/// A fully determined QES bound state. `v` holds the left-branch polynomial
/// coefficients v_0..v_N; the bound-state energy is E = -p.
struct QesSolution {
  QesProblem problem;
  ExponentParams params;
  PotentialCoeffs coeffs;
  double p = 0.0;
  double energy = 0.0;
  std::vector<double> v;
  int nodes = 0;
  double norm = 1.0;
};

inline double poly_eval(const std::vector<double>& coeff, double x) {
  double acc = 0.0;
  for (size_t i = coeff.size(); i-- > 0;) acc = acc * x + coeff[i];
  return acc;
}

inline std::vector<double> poly_derive(const std::vector<double>& coeff) {
  if (coeff.size() <= 1) return {};
  std::vector<double> out(coeff.size() - 1);
  for (size_t i = 1; i < coeff.size(); ++i) out[i - 1] = i * coeff[i];
  return out;
}

}  // namespace qes
