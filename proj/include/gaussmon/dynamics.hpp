#pragma once

#include <iosfwd>
#include <vector>

#include "gaussmon/linalg2.hpp"
#include "gaussmon/model.hpp"
#include "gaussmon/steady_state.hpp"

namespace gaussmon {

/// Deterministic covariance path. times is strictly increasing from 0;
/// dets and purities track det(cov) and hbar/(2 sqrt(det)) pointwise.
struct CovTrajectory {
  std::vector<double> times;
  std::vector<SymMat2> covs;
  std::vector<double> dets;
  std::vector<double> purities;
  double dt = 0.0;  // nominal step (the last step may be shorter)
  double hbar = 0.0;

  std::size_t size() const { return times.size(); }
};

/// Sigma A + A^T Sigma - Sigma B B^T Sigma + Q, symmetrized exactly.
SymMat2 riccati_rhs(const SymMat2& sigma, const SystemMatrices& sys);

/// Classical fixed-step RK4; the last step is shortened to land on t_final.
/// Output is sampled at every step. Positive definiteness and finiteness
/// are checked after each step.
CovTrajectory integrate_riccati(const SymMat2& sigma0,
                                const SystemMatrices& sys, double t_final,
                                double dt);

/// Closed-form transient for Sigma_0 > Sigma_inf. Precomputes the Lyapunov
/// factor once and can then evaluate arbitrarily many times.
class TransientEvaluator {
 public:
  TransientEvaluator(const SymMat2& sigma0, const SteadyStateSolution& ss,
                     const SystemMatrices& sys);

  SymMat2 at(double t) const;

 private:
  SymMat2 sigma0_;
  SymMat2 sigma_inf_;
  Mat2 gamma_;
  SymMat2 y0_inv_;
  SymMat2 lyap_;  // P with Gamma P + P Gamma^T + B B^T = 0
};

/// Single-shot convenience for the closed-form transient.
SymMat2 transient_covariance(const SymMat2& sigma0,
                             const SteadyStateSolution& ss,
                             const SystemMatrices& sys, double t);

/// d(det Sigma)/dt expressed through the traces of B Sigma B and
/// chi B Sigma B.
double determinant_rhs(const SymMat2& sigma, const SystemMatrices& sys,
                       double hbar);

/// dp/dt for the purity, given a consistent (p, Sigma) pair.
double purity_rhs(double p, const SymMat2& sigma, const SystemMatrices& sys);

/// det(Sigma) >= hbar^2/4 up to a 1e-9 relative slack.
bool check_uncertainty(const SymMat2& sigma, double hbar);

/// CSV with header t,v_x,c,v_p,det,purity; 17 significant digits, LF
/// line endings.
void write_csv(const CovTrajectory& path, std::ostream& os);

}  // namespace gaussmon
