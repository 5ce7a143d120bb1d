#include "gaussmon/steady_state.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gaussmon/errors.hpp"
#include "gaussmon/kernels/steady_core.hpp"

namespace gaussmon {

namespace {

SteadyStateSolution assemble_solution(const OscillatorParams& osc,
                                      const DetectorConfig& det,
                                      double residual_tol) {
  using P = kern::ScalarPack;
  const kern::SteadyEval<P> e =
      kern::steady_eval<P>(osc.mass, osc.omega, 0.25 * osc.hbar * osc.hbar,
                           det.eta_x, det.eta_p, det.k_x, det.k_p);

  SteadyStateSolution sol;
  sol.sigma_inf = SymMat2{e.v_x, e.c, e.v_p};
  sol.greeks = GreekParams{e.alpha, e.beta, e.gamma, e.delta};
  sol.sin_theta = e.sin_th;
  sol.d_inf = e.d;
  sol.p_inf = e.p;
  sol.residual = e.resid_rel;

  const double u = det.eta_x * det.k_x;
  const double w = det.eta_p * det.k_p;
  const double mw2 = osc.mass * osc.omega * osc.omega;
  sol.gamma_mat = Mat2{-u * e.v_x, -mw2 - u * e.c, 1.0 / osc.mass - w * e.c,
                       -w * e.v_p};

  if (!(sol.residual < residual_tol)) {
    throw NumericalError("steady state failed the Riccati self-check",
                         sol.residual);
  }
  if (!is_positive_definite(sol.sigma_inf)) {
    throw NumericalError("stationary covariance is not positive definite");
  }
  if (!is_hurwitz(sol.gamma_mat)) {
    throw NumericalError("closed-loop matrix is not Hurwitz",
                         sol.gamma_mat.trace());
  }
  return sol;
}

}  // namespace

SteadyStateSolution steady_state_covariance(const OscillatorParams& osc,
                                            const DetectorConfig& det,
                                            double residual_tol) {
  osc.validate();
  det.validate();
  return assemble_solution(osc, det, residual_tol);
}

double steady_state_determinant(const DetectorConfig& det,
                                const SymMat2& sigma_inf, double hbar) {
  const double tr_chi = det.k_x * sigma_inf.xx + det.k_p * sigma_inf.pp;
  const double tr_b = det.eta_x * det.k_x * sigma_inf.xx +
                      det.eta_p * det.k_p * sigma_inf.pp;
  return 0.25 * hbar * hbar * tr_chi / tr_b;
}

double steady_state_purity(const DetectorConfig& det, const SymMat2& sigma_inf,
                           double hbar) {
  (void)hbar;  // the trace ratio is already dimensionless
  const double tr_chi = det.k_x * sigma_inf.xx + det.k_p * sigma_inf.pp;
  const double tr_b = det.eta_x * det.k_x * sigma_inf.xx +
                      det.eta_p * det.k_p * sigma_inf.pp;
  return std::sqrt(tr_b / tr_chi);
}

PurityInterval purity_interval(const DetectorConfig& det) {
  det.validate();
  return purity_interval(Efficiencies{det.eta_x, det.eta_p});
}

PurityInterval purity_interval(const Efficiencies& eff) {
  eff.validate();
  const double lo = std::sqrt(std::min(eff.eta_x, eff.eta_p));
  const double hi = std::sqrt(std::max(eff.eta_x, eff.eta_p));
  return {lo, hi};
}

double purity_relation_residual(double target_p, const StrengthCoords& coords,
                                const OscillatorParams& osc,
                                const Efficiencies& eff) {
  osc.validate();
  eff.validate();
  coords.validate();
  const Strengths k = strengths_from_coords(coords);
  const auto g = kern::greek_eval<kern::ScalarPack>(
      osc.mass, osc.omega, 0.25 * osc.hbar * osc.hbar, eff.eta_x, eff.eta_p,
      k.k_x, k.k_p);
  const double p2 = target_p * target_p;
  return (1.0 - p2 / eff.eta_x) * g.gamma + (1.0 - p2 / eff.eta_p) * g.delta;
}

namespace {

double purity_at(const OscillatorParams& osc, const Efficiencies& eff,
                 double q, double s) {
  const Strengths k = strengths_from_coords(StrengthCoords{q, s});
  using P = kern::ScalarPack;
  const auto e =
      kern::steady_eval<P>(osc.mass, osc.omega, 0.25 * osc.hbar * osc.hbar,
                           eff.eta_x, eff.eta_p, k.k_x, k.k_p);
  return e.p;
}

}  // namespace

StrengthCoords solve_strengths_for_purity(double target_p,
                                          const OscillatorParams& osc,
                                          const Efficiencies& eff,
                                          double q_hint) {
  osc.validate();
  eff.validate();
  if (!(std::isfinite(target_p) && target_p > 0.0 && target_p <= 1.0)) {
    throw InvalidArgumentError("target purity must be in (0, 1]");
  }
  if (!(std::isfinite(q_hint) && q_hint > 0.0)) {
    throw InvalidArgumentError("q_hint must be positive");
  }

  const PurityInterval range = purity_interval(eff);
  if (range.is_point()) {
    // Every (q, s) yields sqrt(eta); accept the target only if it is that
    // value (up to roundoff) and return the canonical point.
    if (std::fabs(target_p - range.lo) > 1e-12 * std::max(1.0, range.lo)) {
      throw InvalidArgumentError(
          "target purity is outside the reachable interval");
    }
    return {q_hint, 1.0};
  }
  if (!(target_p > range.lo && target_p < range.hi)) {
    throw InvalidArgumentError(
        "target purity is outside the reachable interval");
  }

  double lo = -30.0;
  double hi = 30.0;
  double f_lo = purity_at(osc, eff, q_hint, std::exp(lo)) - target_p;
  double f_hi = purity_at(osc, eff, q_hint, std::exp(hi)) - target_p;
  if (f_lo == 0.0) return {q_hint, std::exp(lo)};
  if (f_hi == 0.0) return {q_hint, std::exp(hi)};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NumericalError("purity bisection bracket failure: f(" +
                             std::to_string(std::exp(lo)) + ") and f(" +
                             std::to_string(std::exp(hi)) +
                             ") have the same sign",
                         f_lo);
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = purity_at(osc, eff, q_hint, std::exp(mid)) - target_p;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const StrengthCoords coords{q_hint, std::exp(0.5 * (lo + hi))};
  const double achieved = purity_at(osc, eff, coords.q, coords.s);
  if (std::fabs(achieved - target_p) > tol::kPuritySolve) {
    throw NumericalError("purity solve did not converge",
                         achieved - target_p);
  }
  return coords;
}

double zero_correlation_ratio(const OscillatorParams& osc,
                              const Efficiencies& eff) {
  osc.validate();
  eff.validate();
  const double mw = osc.mass * osc.omega;
  return mw * mw * std::sqrt(eff.eta_p / eff.eta_x);
}

SteadyStateSolution zero_correlation_solution(const OscillatorParams& osc,
                                              const Efficiencies& eff) {
  const double s_zc = zero_correlation_ratio(osc, eff);
  const DetectorConfig det =
      detector_from_coords(StrengthCoords{1.0, s_zc}, eff);
  SteadyStateSolution sol = steady_state_covariance(osc, det);

  // Replace the generic closed form with the exact diagonal expressions at
  // the zero-correlation point (q-independent).
  const double root = std::pow(eff.eta_x * eff.eta_p, 0.25);
  const double factor = 0.5 * osc.hbar / root;
  const double mw = osc.mass * osc.omega;
  sol.sigma_inf = SymMat2::diagonal(factor / mw, factor * mw);
  sol.d_inf = 0.25 * osc.hbar * osc.hbar / std::sqrt(eff.eta_x * eff.eta_p);
  sol.p_inf = root;

  const double u = det.eta_x * det.k_x;
  const double w = det.eta_p * det.k_p;
  const double mw2 = osc.mass * osc.omega * osc.omega;
  sol.gamma_mat = Mat2{-u * sol.sigma_inf.xx, -mw2, 1.0 / osc.mass,
                       -w * sol.sigma_inf.pp};
  return sol;
}

std::string to_json_string(const SteadyStateSolution& sol) {
  nlohmann::json j{
      {"v_x_inf", sol.sigma_inf.xx},
      {"c_inf", sol.sigma_inf.xp},
      {"v_p_inf", sol.sigma_inf.pp},
      {"d_inf", sol.d_inf},
      {"p_inf", sol.p_inf},
      {"gamma_mat",
       {sol.gamma_mat.a11, sol.gamma_mat.a12, sol.gamma_mat.a21,
        sol.gamma_mat.a22}},
      {"sin_theta", sol.sin_theta},
      {"residual", sol.residual},
  };
  return j.dump(2);
}

}  // namespace gaussmon
