#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gaussmon/dynamics.hpp"
#include "gaussmon/kernels.hpp"
#include "gaussmon/linalg2.hpp"
#include "gaussmon/model.hpp"

namespace gaussmon {

/// One simulated measurement run: conditional mean and integrated readouts
/// on a uniform grid. The covariance path is shared by all trajectories and
/// lives in the CovTrajectory passed to the simulation, not here.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec2> mu;
  std::vector<double> r_x;
  std::vector<double> r_p;
  std::uint64_t seed = 0;
  std::uint64_t traj_index = 0;
};

/// Pointwise ensemble moments of the conditional mean.
struct EnsembleStats {
  std::size_t n_traj = 0;
  std::vector<double> times;
  std::vector<Vec2> mean_mu;
  std::vector<SymMat2> cov_mu;     // unbiased sample covariance
  std::vector<Vec2> stderr_mu;     // sqrt(diag(cov)/n)
};

struct SimOptions {
  std::uint64_t seed = 0;
  std::uint64_t traj_index = 0;
  std::size_t record_stride = 1;
  bool zero_noise = false;  // test hook: deterministic dW = 0 limit
};

struct EnsembleOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  std::size_t keep_records = 0;  // store full series for this many leading
                                 // trajectories
  int threads = 0;               // 0 = auto (GAUSSMON_THREADS caps)
  SimdMode simd = SimdMode::kAuto;
  bool zero_noise = false;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<TrajectoryRecord> records;  // first keep_records trajectories
};

/// Euler-Maruyama along the covariance path's grid. The path must be
/// uniform with step dt; the same Wiener increments drive the mean update
/// and the readouts. Identical (seed, traj_index, parameters, dt) give
/// bit-identical output, standalone or inside any ensemble.
TrajectoryRecord simulate_trajectory(Vec2 mu0, const CovTrajectory& sigma_path,
                                     const SystemMatrices& sys, double dt,
                                     const SimOptions& options);

/// Pointwise mean, unbiased covariance and standard errors of >= 2 records
/// on identical grids.
EnsembleStats ensemble_statistics(std::span<const TrajectoryRecord> records);

/// Batched, optionally parallel ensemble with streaming statistics. Results
/// are byte-deterministic for fixed (seed, parameters, dt) regardless of
/// thread count or SIMD mode.
EnsembleResult simulate_ensemble(Vec2 mu0, const CovTrajectory& sigma_path,
                                 const SystemMatrices& sys, double dt,
                                 const EnsembleOptions& options);

/// CSV with header t,mu_x,mu_p,R_x,R_p.
void write_csv(const TrajectoryRecord& record, std::ostream& os);

/// CSV with header
/// t,mean_mu_x,mean_mu_p,cov_xx,cov_xp,cov_pp,stderr_mu_x,stderr_mu_p.
void write_csv(const EnsembleStats& stats, std::ostream& os);

}  // namespace gaussmon
