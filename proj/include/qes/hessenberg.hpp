#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qes/errors.hpp"

namespace qes {

/// Eigenvalues of a real upper-Hessenberg matrix by the Francis
/// double-shift QR iteration (classic EISPACK hqr scheme). The input is
/// row-major n x n and is consumed. Complex conjugate pairs come out
/// adjacent; the result is sorted ascending by (Re, Im). Throws
/// EigenFailure when deflation stalls beyond `sweep_budget` total sweeps.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(
    std::vector<double> h, int n, int sweep_budget) {
  auto a = [&h, n](int i, int j) -> double& {
    return h[static_cast<size_t>(i) * n + j];
  };
  std::vector<std::complex<double>> eig(n);
  const double eps = 2.22e-16;

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  if (anorm == 0.0) anorm = 1.0;

  int sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    for (;;) {
      // find a negligible subdiagonal element; l is the block start
      int l;
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = a(nn, nn);
      if (l == nn) {  // 1x1 block: one real eigenvalue
        eig[nn--] = x + t;
        break;
      }
      double y = a(nn - 1, nn - 1);
      double w = a(nn, nn - 1) * a(nn - 1, nn);
      if (l == nn - 1) {  // 2x2 block: a real or complex pair
        double p = 0.5 * (y - x);
        double q = p * p + w;
        double z = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          z = p + (p >= 0.0 ? z : -z);
          eig[nn - 1] = x + z;
          eig[nn] = (z != 0.0) ? x - w / z : x + z;
        } else {
          eig[nn - 1] = {x + p, z};
          eig[nn] = {x + p, -z};
        }
        nn -= 2;
        break;
      }
      if (++sweeps > sweep_budget)
        throw EigenFailure("hessenberg_eigenvalues: sweep budget exhausted");
      if (its == 10 || its == 20) {  // exceptional shift against cycling
        t += x;
        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;

      // first column of (H - s1 I)(H - s2 I); start the bulge as high as
      // two consecutive small subdiagonals allow
      double p = 0.0, q = 0.0, r = 0.0;
      int m;
      for (m = nn - 2; m >= l; --m) {
        double z = a(m, m);
        double rr = x - z;
        double ss = y - z;
        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
        q = a(m + 1, m + 1) - z - rr - ss;
        r = a(m + 2, m + 1);
        double s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
        double v = std::abs(p) *
                   (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
        if (u <= eps * v) break;
      }
      for (int i = m + 2; i <= nn; ++i) {
        a(i, i - 2) = 0.0;
        if (i != m + 2) a(i, i - 3) = 0.0;
      }

      // chase the bulge with 3x3 Householder reflections
      for (int k = m; k <= nn - 1; ++k) {
        double scale = 0.0;
        if (k != m) {
          p = a(k, k - 1);
          q = a(k + 1, k - 1);
          r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
          scale = std::abs(p) + std::abs(q) + std::abs(r);
          if (scale != 0.0) {
            p /= scale;
            q /= scale;
            r /= scale;
          }
        }
        double s = std::sqrt(p * p + q * q + r * r);
        if (p < 0.0) s = -s;
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) a(k, k - 1) = -a(k, k - 1);
        } else {
          a(k, k - 1) = -s * scale;
        }
        p += s;
        double hx = p / s, hy = q / s, hz = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {  // row modification
          double pp = a(k, j) + q * a(k + 1, j);
          if (k != nn - 1) {
            pp += r * a(k + 2, j);
            a(k + 2, j) -= pp * hz;
          }
          a(k + 1, j) -= pp * hy;
          a(k, j) -= pp * hx;
        }
        int mmin = std::min(nn, k + 3);
        for (int i = l; i <= mmin; ++i) {  // column modification
          double pp = hx * a(i, k) + hy * a(i, k + 1);
          if (k != nn - 1) {
            pp += hz * a(i, k + 2);
            a(i, k + 2) -= pp * r;
          }
          a(i, k + 1) -= pp * q;
          a(i, k) -= pp;
        }
      }
    }
  }
  std::sort(eig.begin(), eig.end(), [](const auto& u, const auto& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });
  return eig;
}

}  // namespace qes
