#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qes/core.hpp"
#include "qes/errors.hpp"
#include "qes/hessenberg.hpp"
#include "qes/wavefield.hpp"

namespace qes {

/// Coefficients propagated through rows 0..N-2 of (M - pI)v = 0, plus the
/// two terminal row residuals that close the nonlinear system.
struct RecurrenceResult {
  std::vector<double> v;
  double residual_1 = 0.0;  // row N-1
  double residual_2 = 0.0;  // row N
};

struct NewtonSettings {
  double tol_residual = 1e-12;
  double tol_step = 1e-12;
  int max_iter = 60;
  double jacobian_step = 1e-7;
};

namespace detail {

inline double matrix_row_apply(const BandedMatrix& m, const std::vector<double>& v,
                               double p, int i) {
  double acc = (m.main[i] - p) * v[i];
  if (i >= 1) acc += m.sub1[i - 1] * v[i - 1];
  if (i + 1 < m.size) acc += m.super1[i] * v[i + 1];
  if (i + 2 < m.size) acc += m.super2[i] * v[i + 2];
  return acc;
}

}  // namespace detail

/// Seeds (v0, v1) from the parity matching conditions, then solves row k of
/// (M - pI)v = 0 for v_{k+2}; the divisor (k+1)(k+2) never vanishes. The
/// rows N-1 and N are returned as residuals. For N = 0 the derivative
/// matching condition v1 = -b has no coefficient left to absorb it and
/// survives as residual_1 = b.
inline RecurrenceResult propagate_coefficients(const ExponentParams& params, double p,
                                               int degree, Parity parity) {
  if (degree < 0) throw std::invalid_argument("propagate_coefficients: degree < 0");
  if (parity == Parity::Odd && degree < 1)
    throw std::invalid_argument("propagate_coefficients: odd parity needs degree >= 1");

  RecurrenceResult res;
  res.v.assign(degree + 1, 0.0);
  if (parity == Parity::Even) {
    res.v[0] = 1.0;
    if (degree >= 1) res.v[1] = -params.b;
  } else {
    res.v[0] = 0.0;
    res.v[1] = 1.0;
  }
  BandedMatrix m = build_matrix(params, degree);
  for (int k = 0; k + 2 <= degree; ++k) {
    double acc = (m.main[k] - p) * res.v[k];
    if (k >= 1) acc += m.sub1[k - 1] * res.v[k - 1];
    acc += m.super1[k] * res.v[k + 1];
    res.v[k + 2] = -acc / m.super2[k];
  }
  if (degree == 0) {
    res.residual_1 = params.b;
    res.residual_2 = detail::matrix_row_apply(m, res.v, p, 0);
  } else {
    res.residual_1 = detail::matrix_row_apply(m, res.v, p, degree - 1);
    res.residual_2 = detail::matrix_row_apply(m, res.v, p, degree);
  }
  return res;
}

/// Distance from p to the nearest eigenvalue of the dense realization of
/// M(a,b,N); the index of that eigenvalue (in (Re, Im)-ascending order,
/// conjugate pairs included) is written into problem.branch.
inline double eigen_crosscheck(QesSolution& s) {
  BandedMatrix m = build_matrix(s.params, s.problem.degree);
  auto eig = hessenberg_eigenvalues(m.dense(), m.size, 100 * m.size);
  double best = std::abs(eig[0] - std::complex<double>(s.p, 0.0));
  int best_index = 0;
  for (int j = 1; j < static_cast<int>(eig.size()); ++j) {
    double d = std::abs(eig[j] - std::complex<double>(s.p, 0.0));
    if (d < best) {
      best = d;
      best_index = j;
    }
  }
  s.problem.branch = best_index;
  return best;
}

namespace detail {

// Leading-coefficient cutoff below which a solution is demoted to a
// smaller-degree family.
inline constexpr double kDegenerateLeading = 1e-8;

inline void check_leading(const std::vector<double>& v) {
  double peak = 0.0;
  for (double c : v) peak = std::max(peak, std::abs(c));
  if (std::abs(v.back()) <= kDegenerateLeading * peak)
    throw DegenerateLeadingCoefficient(
        "leading coefficient v_N is negligible; state belongs to degree " +
        std::to_string(v.size() - 2));
}

}  // namespace detail

/// Builds the full QesSolution once (a, p) are known: couplings, E = -p,
/// normalization, node count, and the eigenvalue branch label.
inline QesSolution assemble_solution(const QesProblem& problem, const ExponentParams& params,
                                     double p, std::vector<double> v) {
  QesSolution s;
  s.problem = problem;
  s.params = params;
  s.coeffs = couplings_for(params, problem.degree);
  s.p = p;
  s.energy = -p;
  s.v = std::move(v);
  normalize(s);
  s.nodes = count_nodes(s);
  eigen_crosscheck(s);
  return s;
}

/// Damped two-variable Newton on F(a,p) = (residual_1, residual_2) at fixed
/// b. Converges when max|F| <= tol_residual * max_k(1 + |v_k|). The
/// Jacobian is forward finite differences; the step is halved up to 20
/// times until ||F|| decreases. Deterministic for identical inputs.
inline QesSolution solve_at_b(const QesProblem& problem, double guess_a, double guess_p,
                              const NewtonSettings& settings = {}) {
  double a = guess_a;
  double p = guess_p;
  auto eval = [&](double aa, double pp) {
    return propagate_coefficients({aa, problem.b}, pp, problem.degree, problem.parity);
  };
  RecurrenceResult cur = eval(a, p);
  auto scale_of = [](const RecurrenceResult& r) {
    double scale = 1.0;
    for (double c : r.v) scale = std::max(scale, 1.0 + std::abs(c));
    return scale;
  };
  auto norm2 = [](const RecurrenceResult& r) {
    return std::hypot(r.residual_1, r.residual_2);
  };

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    if (std::max(std::abs(cur.residual_1), std::abs(cur.residual_2)) <=
        settings.tol_residual * scale_of(cur)) {
      detail::check_leading(cur.v);
      return assemble_solution(problem, {a, problem.b}, p, cur.v);
    }
    double ha = settings.jacobian_step * (1.0 + std::abs(a));
    double hp = settings.jacobian_step * (1.0 + std::abs(p));
    RecurrenceResult fa = eval(a + ha, p);
    RecurrenceResult fp = eval(a, p + hp);
    double j11 = (fa.residual_1 - cur.residual_1) / ha;
    double j21 = (fa.residual_2 - cur.residual_2) / ha;
    double j12 = (fp.residual_1 - cur.residual_1) / hp;
    double j22 = (fp.residual_2 - cur.residual_2) / hp;
    double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det))
      throw NoConvergence("solve_at_b: singular Jacobian", cur.residual_1, cur.residual_2);
    double da = (-cur.residual_1 * j22 + cur.residual_2 * j12) / det;
    double dp = (cur.residual_1 * j21 - cur.residual_2 * j11) / det;

    double lambda = 1.0;
    bool improved = false;
    for (int halve = 0; halve < 20; ++halve) {
      RecurrenceResult trial = eval(a + lambda * da, p + lambda * dp);
      if (norm2(trial) < norm2(cur)) {
        a += lambda * da;
        p += lambda * dp;
        cur = std::move(trial);
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw NoConvergence("solve_at_b: damping failed to reduce the residual",
                          cur.residual_1, cur.residual_2);
    if (std::hypot(da, dp) * lambda <=
        settings.tol_step * (1.0 + std::hypot(a, p))) {
      // step collapsed; accept only if the residual test passes
      if (std::max(std::abs(cur.residual_1), std::abs(cur.residual_2)) <=
          settings.tol_residual * scale_of(cur)) {
        detail::check_leading(cur.v);
        return assemble_solution(problem, {a, problem.b}, p, cur.v);
      }
    }
  }
  if (std::max(std::abs(cur.residual_1), std::abs(cur.residual_2)) <=
      settings.tol_residual * scale_of(cur)) {
    detail::check_leading(cur.v);
    return assemble_solution(problem, {a, problem.b}, p, cur.v);
  }
  throw NoConvergence("solve_at_b: no convergence after max_iter", cur.residual_1,
                      cur.residual_2);
}

/// Coarse grid scan of ||F(a,p)|| returning local minima (below `threshold`)
/// as Newton seeds, best first. Grid rows are scanned by a small worker
/// pool capped by the QES_THREADS environment variable; the result does not
/// depend on the schedule.
inline std::vector<std::pair<double, double>> scan_guesses(
    const QesProblem& problem, double a_lo, double a_hi, double p_lo, double p_hi,
    int grid, double threshold = 1e3, int max_candidates = 40) {
  if (grid < 1 || !(a_lo <= a_hi) || !(p_lo <= p_hi))
    throw std::invalid_argument("scan_guesses: bad ranges or grid");
  std::vector<double> as(grid), ps(grid);
  for (int i = 0; i < grid; ++i) {
    as[i] = grid == 1 ? a_lo : a_lo + (a_hi - a_lo) * i / (grid - 1);
    ps[i] = grid == 1 ? p_lo : p_lo + (p_hi - p_lo) * i / (grid - 1);
  }
  std::vector<double> norm(static_cast<size_t>(grid) * grid);

  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("QES_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) workers = std::min<unsigned>(workers, static_cast<unsigned>(cap));
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid));
  auto run_rows = [&](int begin, int end) {
    for (int i = begin; i < end; ++i)
      for (int j = 0; j < grid; ++j) {
        RecurrenceResult r =
            propagate_coefficients({as[i], problem.b}, ps[j], problem.degree, problem.parity);
        norm[static_cast<size_t>(i) * grid + j] = std::hypot(r.residual_1, r.residual_2);
      }
  };
  if (workers <= 1) {
    run_rows(0, grid);
  } else {
    std::vector<std::thread> pool;
    int chunk = (grid + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      int begin = w * chunk;
      int end = std::min(grid, begin + chunk);
      if (begin < end) pool.emplace_back(run_rows, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  struct Candidate {
    double value, a, p;
  };
  std::vector<Candidate> found;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double val = norm[static_cast<size_t>(i) * grid + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= grid || jj >= grid) continue;
          if (norm[static_cast<size_t>(ii) * grid + jj] < val) {
            is_min = false;
            break;
          }
        }
      if (is_min && val < threshold) found.push_back({val, as[i], ps[j]});
    }
  std::sort(found.begin(), found.end(), [](const Candidate& u, const Candidate& v) {
    if (u.value != v.value) return u.value < v.value;
    if (u.a != v.a) return u.a < v.a;
    return u.p < v.p;
  });
  if (found.empty())
    throw EmptyScan("scan_guesses: no local minimum below threshold " +
                    std::to_string(threshold));
  if (static_cast<int>(found.size()) > max_candidates) found.resize(max_candidates);
  std::vector<std::pair<double, double>> out;
  out.reserve(found.size());
  for (const auto& c : found) out.emplace_back(c.a, c.p);
  return out;
}

/// One point of a b-sweep: either a converged solution or an explicit gap.
struct SweepPoint {
  double b = 0.0;
  bool converged = false;
  std::optional<QesSolution> solution;
  std::string diagnostic;  // set on gaps
};

struct ScanBox {
  double a_lo = -2.2, a_hi = 2.2;
  double p_lo = -30.0, p_hi = 20.0;
  int grid = 60;
};

/// Continuation sweep over b: the first point is solved from `guess` (or a
/// scan when absent), every later point from the last converged (a, p).
/// Newton failures become gap points, not errors; points at b = 0 are
/// skipped the same way. Sequential by contract.
inline std::vector<SweepPoint> sweep(QesProblem problem, double b_min, double b_max,
                                     int steps,
                                     std::optional<std::pair<double, double>> guess = {},
                                     const NewtonSettings& settings = {},
                                     const ScanBox& box = {}) {
  if (steps < 2) throw std::invalid_argument("sweep: steps must be >= 2");
  std::vector<SweepPoint> out;
  out.reserve(steps);
  double delta = (b_max - b_min) / (steps - 1);
  std::optional<std::pair<double, double>> seed = guess;
  for (int i = 0; i < steps; ++i) {
    double b = b_min + delta * i;
    SweepPoint point;
    point.b = b;
    if (b == 0.0) {
      point.diagnostic = "b = 0 excluded from the family";
      out.push_back(std::move(point));
      continue;
    }
    problem.b = b;
    try {
      std::vector<std::pair<double, double>> candidates;
      if (seed) {
        candidates.push_back(*seed);
      } else {
        candidates = scan_guesses(problem, box.a_lo, box.a_hi, box.p_lo, box.p_hi, box.grid);
      }
      bool done = false;
      std::string last_error;
      for (const auto& [ga, gp] : candidates) {
        try {
          QesSolution s = solve_at_b(problem, ga, gp, settings);
          seed = std::make_pair(s.params.a, s.p);
          point.converged = true;
          point.solution = std::move(s);
          done = true;
          break;
        } catch (const Error& e) {
          last_error = e.what();
        }
      }
      if (!done) point.diagnostic = last_error.empty() ? "no candidate converged" : last_error;
    } catch (const Error& e) {
      point.diagnostic = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace qes
