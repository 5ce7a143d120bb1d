#include "gaussmon/dynamics.hpp"

#include <cmath>
#include <ostream>

#include "gaussmon/errors.hpp"
#include "gaussmon/io.hpp"

namespace gaussmon {

SymMat2 riccati_rhs(const SymMat2& sigma, const SystemMatrices& sys) {
  const Mat2 s = sigma.full();
  const Mat2 drift = s * sys.a;  // Sigma A; A^T Sigma is its transpose
  const Mat2 pump = s * (sys.bbt.full() * s);
  SymMat2 rhs = sym_part(drift + drift.transpose() - pump);
  rhs.xx += sys.q.xx;
  rhs.pp += sys.q.pp;
  return rhs;
}

CovTrajectory integrate_riccati(const SymMat2& sigma0,
                                const SystemMatrices& sys, double t_final,
                                double dt) {
  if (!sigma0.finite() || !is_positive_definite(sigma0)) {
    throw InvalidArgumentError(
        "integrate_riccati: sigma0 must be positive definite");
  }
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw InvalidArgumentError("integrate_riccati: dt must be positive");
  }
  if (!(std::isfinite(t_final) && t_final >= 0.0)) {
    throw InvalidArgumentError(
        "integrate_riccati: t_final must be nonnegative");
  }

  CovTrajectory path;
  path.dt = dt;
  path.hbar = sys.hbar;
  const auto push = [&](double t, const SymMat2& cov) {
    path.times.push_back(t);
    path.covs.push_back(cov);
    const double d = cov.det();
    path.dets.push_back(d);
    path.purities.push_back(0.5 * sys.hbar / std::sqrt(d));
  };

  SymMat2 cov = sigma0;
  push(0.0, cov);

  const double n_exact = t_final / dt;
  std::size_t n_full = static_cast<std::size_t>(n_exact);
  // Land exactly on t_final: a full step that overshoots by roundoff only
  // is treated as the final one.
  if (n_exact - static_cast<double>(n_full) < 1e-9 && n_full > 0) --n_full;

  std::size_t step = 0;
  double t = 0.0;
  while (t < t_final) {
    const bool last = (step >= n_full);
    const double h = last ? t_final - t : dt;
    const double t_next = last ? t_final : (static_cast<double>(step + 1) * dt);

    const SymMat2 k1 = riccati_rhs(cov, sys);
    const SymMat2 k2 = riccati_rhs(cov + 0.5 * h * k1, sys);
    const SymMat2 k3 = riccati_rhs(cov + 0.5 * h * k2, sys);
    const SymMat2 k4 = riccati_rhs(cov + h * k3, sys);
    cov = cov + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!cov.finite()) {
      throw NumericalError("integrate_riccati: non-finite covariance",
                           t_next);
    }
    if (!is_positive_definite(cov)) {
      throw NumericalError(
          "integrate_riccati: covariance lost positive definiteness", t_next);
    }
    push(t_next, cov);
    t = t_next;
    ++step;
  }
  return path;
}

TransientEvaluator::TransientEvaluator(const SymMat2& sigma0,
                                       const SteadyStateSolution& ss,
                                       const SystemMatrices& sys)
    : sigma0_(sigma0), sigma_inf_(ss.sigma_inf), gamma_(ss.gamma_mat) {
  if (!sigma0.finite()) {
    throw InvalidArgumentError("transient: sigma0 must be finite");
  }
  const SymMat2 y0 = sigma0 - ss.sigma_inf;
  if (!is_positive_definite(y0)) {
    throw InvalidArgumentError(
        "transient: requires sigma0 > sigma_inf; use integrate_riccati for "
        "this initial condition");
  }
  y0_inv_ = inverse(y0);
  lyap_ = solve_lyapunov(gamma_, sys.bbt);
}

SymMat2 TransientEvaluator::at(double t) const {
  if (!(std::isfinite(t) && t >= 0.0)) {
    throw InvalidArgumentError("transient: t must be nonnegative");
  }
  if (t == 0.0) return sigma0_;

  const Mat2 e = mat_exp(gamma_, t);
  const SymMat2 z = lyap_ - sym_part(e * (lyap_.full() * e.transpose()));
  const SymMat2 w = inverse(y0_inv_ + z);
  const SymMat2 result =
      sigma_inf_ + sym_part(e.transpose() * (w.full() * e));
  if (!result.finite()) {
    throw NumericalError("transient: non-finite result", t);
  }
  return result;
}

SymMat2 transient_covariance(const SymMat2& sigma0,
                             const SteadyStateSolution& ss,
                             const SystemMatrices& sys, double t) {
  return TransientEvaluator(sigma0, ss, sys).at(t);
}

double determinant_rhs(const SymMat2& sigma, const SystemMatrices& sys,
                       double hbar) {
  const double tr_b = sys.bbt.xx * sigma.xx + sys.bbt.pp * sigma.pp;
  const double tr_chi = sys.k_x * sigma.xx + sys.k_p * sigma.pp;
  return tr_b * (0.25 * hbar * hbar * tr_chi / tr_b - sigma.det());
}

double purity_rhs(double p, const SymMat2& sigma, const SystemMatrices& sys) {
  // Chain rule on p = hbar/(2 sqrt(d)) through the determinant flow; the
  // bracket alone is dimensionless, the trace carries the rate.
  const double tr_b = sys.bbt.xx * sigma.xx + sys.bbt.pp * sigma.pp;
  const double tr_chi = sys.k_x * sigma.xx + sys.k_p * sigma.pp;
  return -0.5 * p * tr_b * (tr_chi / tr_b * p * p - 1.0);
}

bool check_uncertainty(const SymMat2& sigma, double hbar) {
  return sigma.det() >= 0.25 * hbar * hbar * (1.0 - 1e-9);
}

void write_csv(const CovTrajectory& path, std::ostream& os) {
  std::string out = "t,v_x,c,v_p,det,purity\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out += format_double(path.times[i]);
    out += ',';
    out += format_double(path.covs[i].xx);
    out += ',';
    out += format_double(path.covs[i].xp);
    out += ',';
    out += format_double(path.covs[i].pp);
    out += ',';
    out += format_double(path.dets[i]);
    out += ',';
    out += format_double(path.purities[i]);
    out += '\n';
  }
  os << out;
}

}  // namespace gaussmon
