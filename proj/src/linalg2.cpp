#include "gaussmon/linalg2.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gaussmon/errors.hpp"

namespace gaussmon {

double det2(double a, double b, double c, double d) {
  // Kahan: w carries the rounding error of b*c, restoring it after the
  // cancellation in a*d - b*c.
  const double w = b * c;
  const double e = std::fma(b, c, -w);
  const double f = std::fma(a, d, -w);
  return f - e;
}

double Mat2::det() const { return det2(a11, a12, a21, a22); }

double SymMat2::det() const { return det2(xx, xp, xp, pp); }

double max_abs(const SymMat2& s) {
  return std::max({std::fabs(s.xx), std::fabs(s.xp), std::fabs(s.pp)});
}

double max_abs(const Mat2& m) {
  return std::max({std::fabs(m.a11), std::fabs(m.a12), std::fabs(m.a21),
                   std::fabs(m.a22)});
}

Mat2 mat_exp(const Mat2& m, double t, double branch_tol) {
  if (!m.finite() || !std::isfinite(t)) {
    throw InvalidArgumentError("mat_exp: non-finite input");
  }
  const double half_trace = 0.5 * (m.a11 + m.a22);
  // Traceless part n has eigenvalues +-sqrt(disc).
  const Mat2 n{m.a11 - half_trace, m.a12, m.a21, m.a22 - half_trace};
  const double disc = 0.25 * (m.a11 - m.a22) * (m.a11 - m.a22) + m.a12 * m.a21;

  double cosh_term = 1.0;  // cosh(w t) or cos(w t)
  double sinc_term = t;    // sinh(w t)/w or sin(w t)/w; limit t at w = 0
  if (std::fabs(disc) < branch_tol) {
    // repeated eigenvalue: exp(n t) = I + n t
  } else if (disc > 0.0) {
    const double w = std::sqrt(disc);
    cosh_term = std::cosh(w * t);
    sinc_term = std::sinh(w * t) / w;
  } else {
    const double w = std::sqrt(-disc);
    cosh_term = std::cos(w * t);
    sinc_term = std::sin(w * t) / w;
  }

  const double scale = std::exp(half_trace * t);
  Mat2 e = cosh_term * Mat2::identity() + sinc_term * n;
  return scale * e;
}

SymMat2 solve_lyapunov(const Mat2& g, const SymMat2& rhs) {
  if (!is_hurwitz(g)) {
    throw NumericalError("solve_lyapunov: g is not Hurwitz", g.trace());
  }
  // g P + P g^T + rhs = 0 written as a 3x3 linear system on (xx, xp, pp).
  double a[3][4] = {
      {2.0 * g.a11, 2.0 * g.a12, 0.0, -rhs.xx},
      {g.a21, g.a11 + g.a22, g.a12, -rhs.xp},
      {0.0, 2.0 * g.a21, 2.0 * g.a22, -rhs.pp},
  };

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) {
      throw NumericalError("solve_lyapunov: singular system");
    }
    if (pivot != col) std::swap(a[pivot], a[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  double sol[3];
  for (int r = 2; r >= 0; --r) {
    double acc = a[r][3];
    for (int c = r + 1; c < 3; ++c) acc -= a[r][c] * sol[c];
    sol[r] = acc / a[r][r];
  }
  SymMat2 p{sol[0], sol[1], sol[2]};
  if (!p.finite()) {
    throw NumericalError("solve_lyapunov: non-finite solution");
  }
  return p;
}

bool is_positive_definite(const SymMat2& s) {
  return s.xx > 0.0 && s.det() > 0.0;
}

bool is_hurwitz(const Mat2& m) { return m.trace() < 0.0 && m.det() > 0.0; }

SymMat2 sym_sqrt(const SymMat2& s, double neg_tol) {
  const double scale = std::max(1.0, max_abs(s));
  const double tr = s.trace();
  const double gap = std::hypot(0.5 * (s.xx - s.pp), s.xp);
  const double eig_min = 0.5 * tr - gap;
  if (eig_min < -neg_tol * scale) {
    throw InvalidArgumentError("sym_sqrt: matrix has a negative eigenvalue");
  }
  const double d = std::sqrt(std::max(s.det(), 0.0));
  const double denom_sq = tr + 2.0 * d;
  if (denom_sq <= 0.0) return {};  // zero matrix within tolerance
  const double denom = std::sqrt(denom_sq);
  return {(s.xx + d) / denom, s.xp / denom, (s.pp + d) / denom};
}

SymMat2 inverse(const SymMat2& s) {
  const double d = s.det();
  if (d == 0.0 || !std::isfinite(1.0 / d)) {
    throw NumericalError("inverse: singular matrix", d);
  }
  return {s.pp / d, -s.xp / d, s.xx / d};
}

}  // namespace gaussmon
