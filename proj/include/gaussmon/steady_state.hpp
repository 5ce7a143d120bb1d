#pragma once

#include <string>

#include "gaussmon/linalg2.hpp"
#include "gaussmon/model.hpp"

namespace gaussmon {

/// Stationary solution of the covariance dynamics together with the
/// quantities derived from it. Invariants (checked on construction):
/// sigma_inf > 0, gamma_mat Hurwitz, relative ARE residual below tolerance,
/// d_inf >= hbar^2/4 and 0 < p_inf <= 1.
struct SteadyStateSolution {
  SymMat2 sigma_inf;  // (v_x_inf, c_inf, v_p_inf)
  Mat2 gamma_mat;     // A - B B^T Sigma_inf
  double d_inf = 0.0;
  double p_inf = 0.0;
  GreekParams greeks;
  double sin_theta = 0.0;
  double residual = 0.0;  // relative ARE residual of the closed form
};

/// Open interval of reachable steady-state purities,
/// (sqrt(min eta), sqrt(max eta)); degenerates to a point when the
/// efficiencies are equal.
struct PurityInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool is_point() const { return lo == hi; }
  bool contains(double p) const { return is_point() ? p == lo
                                                    : (p > lo && p < hi); }
};

namespace tol {
inline constexpr double kAreResidual = 1e-9;
inline constexpr double kPuritySolve = 1e-8;
}  // namespace tol

/// Closed-form stationary covariance with its self-check: the assembled
/// solution is substituted back into the Riccati fixed-point equation and
/// rejected if the relative residual exceeds the tolerance.
SteadyStateSolution steady_state_covariance(
    const OscillatorParams& osc, const DetectorConfig& det,
    double residual_tol = tol::kAreResidual);

/// (hbar^2/4) tr(chi B Sigma B)/tr(B Sigma B) evaluated from an arbitrary
/// covariance; equals det(Sigma) when Sigma is the stationary solution.
double steady_state_determinant(const DetectorConfig& det,
                                const SymMat2& sigma_inf, double hbar);

/// sqrt(tr(B Sigma B)/tr(chi B Sigma B)).
double steady_state_purity(const DetectorConfig& det, const SymMat2& sigma_inf,
                           double hbar);

PurityInterval purity_interval(const DetectorConfig& det);
PurityInterval purity_interval(const Efficiencies& eff);

/// Left-hand side of (1 - p^2/eta_x) gamma + (1 - p^2/eta_p) delta; zero
/// exactly when (q, s) realizes the target purity.
double purity_relation_residual(double target_p, const StrengthCoords& coords,
                                const OscillatorParams& osc,
                                const Efficiencies& eff);

/// Finds (q, s) with p_inf(q, s) = target_p. q is pinned to q_hint and the
/// ratio is bisected on log s over [-30, 30]; bracket signs are checked at
/// runtime rather than assumed.
StrengthCoords solve_strengths_for_purity(double target_p,
                                          const OscillatorParams& osc,
                                          const Efficiencies& eff,
                                          double q_hint = 1e-6);

/// The unique ratio s with zero stationary correlation:
/// s = m^2 w^2 sqrt(eta_p/eta_x), independent of q.
double zero_correlation_ratio(const OscillatorParams& osc,
                              const Efficiencies& eff);

/// Stationary state at the zero-correlation ratio, from its diagonal closed
/// form. gamma_mat and the Greek parameters are reported for q = 1 (they
/// depend on q; the covariance, determinant and purity do not).
SteadyStateSolution zero_correlation_solution(const OscillatorParams& osc,
                                              const Efficiencies& eff);

/// JSON with keys v_x_inf, c_inf, v_p_inf, d_inf, p_inf,
/// gamma_mat (row-major), sin_theta, residual.
std::string to_json_string(const SteadyStateSolution& solution);

}  // namespace gaussmon
