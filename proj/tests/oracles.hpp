#pragma once

// Test-only reference computations, kept independent of the library code
// paths they check.

#include <algorithm>
#include <cmath>
#include <random>

#include "gaussmon/linalg2.hpp"
#include "gaussmon/model.hpp"

namespace oracles {

using gaussmon::Mat2;
using gaussmon::SymMat2;
using gaussmon::SystemMatrices;

/// Matrix exponential by scaled Taylor series (independent of the
/// closed-form production path). Accurate to ~1e-14 for moderate norms.
inline Mat2 series_exp(const Mat2& m, double t) {
  Mat2 a = t * m;
  int squarings = 0;
  while (gaussmon::max_abs(a) > 0.5) {
    a = 0.5 * a;
    ++squarings;
  }
  Mat2 sum = Mat2::identity();
  Mat2 term = Mat2::identity();
  for (int k = 1; k <= 40; ++k) {
    term = (1.0 / k) * (term * a);
    sum = sum + term;
    if (gaussmon::max_abs(term) < 1e-20) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
  return gaussmon::max_abs(a - b);
}

inline double max_abs_diff(const SymMat2& a, const SymMat2& b) {
  return gaussmon::max_abs(a - b);
}

/// Riccati right-hand side written out entrywise for the specific shapes of
/// A, B and Q; cross-checks the matrix-product implementation.
inline SymMat2 riccati_rhs_expanded(const SymMat2& s,
                                    const SystemMatrices& sys) {
  const double u = sys.eta_x * sys.k_x;
  const double w = sys.eta_p * sys.k_p;
  const double mw2 = sys.mass * sys.omega * sys.omega;
  const double im = 1.0 / sys.mass;
  const double h24 = 0.25 * sys.hbar * sys.hbar;
  return SymMat2{
      2.0 * s.xp * im - (u * s.xx * s.xx + w * s.xp * s.xp) + h24 * sys.k_p,
      s.pp * im - mw2 * s.xx - s.xp * (u * s.xx + w * s.pp),
      -2.0 * mw2 * s.xp - (u * s.xp * s.xp + w * s.pp * s.pp) +
          h24 * sys.k_x};
}

/// RK4 for the linear unconditional-moment equation
/// dS/dt = A^T S + S A + Q (no measurement terms).
inline SymMat2 linear_moment_ode(const SymMat2& s0, const SystemMatrices& sys,
                                 double t_final, double dt) {
  const auto rhs = [&](const SymMat2& s) {
    const Mat2 m = sys.a.transpose() * s.full();
    SymMat2 out = gaussmon::sym_part(m + m.transpose());
    out.xx += sys.q.xx;
    out.pp += sys.q.pp;
    return out;
  };
  SymMat2 s = s0;
  double t = 0.0;
  while (t < t_final) {
    const double h = std::min(dt, t_final - t);
    const SymMat2 k1 = rhs(s);
    const SymMat2 k2 = rhs(s + 0.5 * h * k1);
    const SymMat2 k3 = rhs(s + 0.5 * h * k2);
    const SymMat2 k4 = rhs(s + h * k3);
    s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return s;
}

/// Log-uniform draw.
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// Random parameter draw over the stated acceptance ranges.
inline gaussmon::OscillatorParams random_oscillator(std::mt19937_64& rng,
                                                    double lo = 1e-3,
                                                    double hi = 1e3) {
  return {log_uniform(rng, lo, hi), log_uniform(rng, lo, hi), 2.0};
}

inline gaussmon::DetectorConfig random_detector(std::mt19937_64& rng,
                                                double lo = 1e-3,
                                                double hi = 1e3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto eta = [&] {
    double e = 0.0;
    while (e <= 0.0) e = u(rng);
    return e;
  };
  return {log_uniform(rng, lo, hi), log_uniform(rng, lo, hi), eta(), eta()};
}

/// Random Hurwitz matrix: negative-definite symmetric part plus rotation.
inline Mat2 random_hurwitz(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Mat2 m{-(1.0 + std::fabs(u(rng)) * 4.0), u(rng) * 3.0, u(rng) * 3.0,
                 -(1.0 + std::fabs(u(rng)) * 4.0)};
    if (gaussmon::is_hurwitz(m)) return m;
  }
}

/// Random symmetric positive-definite matrix L L^T + eps I.
inline SymMat2 random_spd(std::mt19937_64& rng, double eps = 0.1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double l11 = u(rng), l21 = u(rng), l22 = u(rng);
  return SymMat2{l11 * l11 + eps, l11 * l21,
                 l21 * l21 + l22 * l22 + eps};
}

}  // namespace oracles
