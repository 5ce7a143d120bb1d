#pragma once

#include <cmath>

namespace gaussmon {

/// Phase-space vector (position, momentum).
struct Vec2 {
  double x = 0.0;
  double p = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.p + b.p}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.p - b.p}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.p}; }
};

/// General real 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diagonal(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  double trace() const { return a11 + a22; }
  double det() const;

  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2 operator*(double s, const Mat2& m) {
    return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Vec2 operator*(const Mat2& m, Vec2 v) {
    return {m.a11 * v.x + m.a12 * v.p, m.a21 * v.x + m.a22 * v.p};
  }

  bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
           std::isfinite(a22);
  }
};

/// Symmetric 2x2 matrix stored as (xx, xp, pp); symmetric by construction.
struct SymMat2 {
  double xx = 0.0;
  double xp = 0.0;
  double pp = 0.0;

  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  static SymMat2 diagonal(double d1, double d2) { return {d1, 0.0, d2}; }

  double trace() const { return xx + pp; }
  double det() const;
  Mat2 full() const { return {xx, xp, xp, pp}; }

  friend SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
    return {a.xx + b.xx, a.xp + b.xp, a.pp + b.pp};
  }
  friend SymMat2 operator-(const SymMat2& a, const SymMat2& b) {
    return {a.xx - b.xx, a.xp - b.xp, a.pp - b.pp};
  }
  friend SymMat2 operator*(double s, const SymMat2& m) {
    return {s * m.xx, s * m.xp, s * m.pp};
  }

  bool finite() const {
    return std::isfinite(xx) && std::isfinite(xp) && std::isfinite(pp);
  }
};

/// Exact symmetrization (M + M^T)/2.
inline SymMat2 sym_part(const Mat2& m) {
  return {m.a11, 0.5 * (m.a12 + m.a21), m.a22};
}

/// ad - bc evaluated with Kahan's fma trick; keeps full relative accuracy
/// even under heavy cancellation.
double det2(double a, double b, double c, double d);

/// Largest absolute entry.
double max_abs(const SymMat2& s);
double max_abs(const Mat2& m);

namespace tol {
/// |discriminant| below which mat_exp uses the repeated-eigenvalue branch.
inline constexpr double kExpBranchSwitch = 1e-12;
/// Most negative eigenvalue (relative to scale) tolerated by sym_sqrt.
inline constexpr double kSqrtNegative = 1e-12;
}  // namespace tol

/// exp(m*t) via the 2x2 closed form with distinct-real, complex-pair and
/// repeated-eigenvalue branches.
Mat2 mat_exp(const Mat2& m, double t,
             double branch_tol = tol::kExpBranchSwitch);

/// Unique symmetric P with g P + P g^T + rhs = 0; g must be Hurwitz.
SymMat2 solve_lyapunov(const Mat2& g, const SymMat2& rhs);

/// Strict test: xx > 0 and det > 0.
bool is_positive_definite(const SymMat2& s);

/// Both eigenvalues in the open left half-plane (trace < 0 and det > 0).
bool is_hurwitz(const Mat2& m);

/// Unique positive-semidefinite square root of a PSD matrix.
SymMat2 sym_sqrt(const SymMat2& s, double neg_tol = tol::kSqrtNegative);

/// Inverse of a symmetric 2x2 matrix.
SymMat2 inverse(const SymMat2& s);

}  // namespace gaussmon
