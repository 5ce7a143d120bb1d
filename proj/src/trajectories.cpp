#include "gaussmon/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gaussmon/errors.hpp"
#include "gaussmon/io.hpp"
#include "gaussmon/parallel.hpp"

namespace gaussmon {

namespace {

// Fixed work unit sizes; they define the accumulation order and therefore
// the exact ensemble bytes, so they are not tunables.
constexpr std::size_t kBatchTraj = 4;
constexpr std::size_t kChunkBatches = 64;
constexpr std::size_t kChunkTraj = kBatchTraj * kChunkBatches;

struct GridInfo {
  std::size_t n_steps = 0;
  std::size_t n_records = 0;
};

GridInfo check_grid(const CovTrajectory& sigma_path, double dt,
                    std::size_t record_stride) {
  if (sigma_path.size() < 2) {
    throw InvalidArgumentError("simulate: covariance path needs >= 2 points");
  }
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw InvalidArgumentError("simulate: dt must be positive");
  }
  const double tol = 1e-9 * std::max(1.0, dt);
  for (std::size_t i = 0; i + 1 < sigma_path.size(); ++i) {
    if (std::fabs(sigma_path.times[i + 1] - sigma_path.times[i] - dt) > tol) {
      throw InvalidArgumentError(
          "simulate: covariance path grid does not match dt");
    }
  }
  if (record_stride == 0) {
    throw InvalidArgumentError("simulate: record_stride must be >= 1");
  }
  const std::size_t n_steps = sigma_path.size() - 1;
  if (n_steps % record_stride != 0) {
    throw InvalidArgumentError(
        "simulate: step count must be a multiple of record_stride");
  }
  return {n_steps, n_steps / record_stride + 1};
}

kern::EmCoeffs make_coeffs(Vec2 mu0, const SystemMatrices& sys, double dt,
                           std::uint64_t seed, bool zero_noise) {
  kern::EmCoeffs co;
  const Mat2 at = sys.a.transpose();
  co.at11 = at.a11;
  co.at12 = at.a12;
  co.at21 = at.a21;
  co.at22 = at.a22;
  co.dt = dt;
  co.sqrt_dt = std::sqrt(dt);
  co.rx_scale = 1.0 / sys.b.a11;
  co.rp_scale = 1.0 / sys.b.a22;
  co.mu0_x = mu0.x;
  co.mu0_p = mu0.p;
  co.seed = seed;
  co.zero_noise = zero_noise;
  return co;
}

/// Sigma_t B per step, flattened [step][4].
std::vector<double> make_sigma_b(const CovTrajectory& path,
                                 const SystemMatrices& sys,
                                 std::size_t n_steps) {
  std::vector<double> sb(4 * n_steps);
  const double b1 = sys.b.a11;
  const double b2 = sys.b.a22;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const SymMat2& s = path.covs[n];
    sb[4 * n + 0] = s.xx * b1;
    sb[4 * n + 1] = s.xp * b2;
    sb[4 * n + 2] = s.xp * b1;
    sb[4 * n + 3] = s.pp * b2;
  }
  return sb;
}

std::vector<double> record_times(const CovTrajectory& path,
                                 std::size_t record_stride,
                                 std::size_t n_records) {
  std::vector<double> t(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    t[i] = path.times[i * record_stride];
  }
  return t;
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericalError(std::string("simulate: non-finite ") + what);
    }
  }
}

}  // namespace

TrajectoryRecord simulate_trajectory(Vec2 mu0, const CovTrajectory& sigma_path,
                                     const SystemMatrices& sys, double dt,
                                     const SimOptions& options) {
  const GridInfo grid = check_grid(sigma_path, dt, options.record_stride);
  const kern::EmCoeffs co =
      make_coeffs(mu0, sys, dt, options.seed, options.zero_noise);
  const std::vector<double> sb = make_sigma_b(sigma_path, sys, grid.n_steps);

  std::vector<double> mu_x(grid.n_records), mu_p(grid.n_records),
      r_x(grid.n_records), r_p(grid.n_records);
  kern::EmCapture capture;
  capture.base = options.traj_index;
  capture.limit = options.traj_index + 1;
  capture.n_records = grid.n_records;
  capture.mu_x = mu_x.data();
  capture.mu_p = mu_p.data();
  capture.r_x = r_x.data();
  capture.r_p = r_p.data();

  // Single trajectory: always the scalar reference kernel.
  const auto batch = kern::em_batch_fn(SimdMode::kScalar);
  batch(co, sb.data(), grid.n_steps, options.record_stride,
        options.traj_index, 1, nullptr, &capture);

  require_finite(mu_x, "mean");
  require_finite(mu_p, "mean");

  TrajectoryRecord rec;
  rec.seed = options.seed;
  rec.traj_index = options.traj_index;
  rec.times = record_times(sigma_path, options.record_stride, grid.n_records);
  rec.mu.resize(grid.n_records);
  for (std::size_t i = 0; i < grid.n_records; ++i) {
    rec.mu[i] = Vec2{mu_x[i], mu_p[i]};
  }
  rec.r_x = std::move(r_x);
  rec.r_p = std::move(r_p);
  return rec;
}

EnsembleStats ensemble_statistics(std::span<const TrajectoryRecord> records) {
  if (records.size() < 2) {
    throw InvalidArgumentError("ensemble_statistics: needs >= 2 records");
  }
  const std::size_t n_pts = records[0].times.size();
  for (const auto& r : records) {
    if (r.times.size() != n_pts || r.mu.size() != n_pts) {
      throw InvalidArgumentError("ensemble_statistics: mismatched grids");
    }
    for (std::size_t i = 0; i < n_pts; ++i) {
      if (r.times[i] != records[0].times[i]) {
        throw InvalidArgumentError("ensemble_statistics: mismatched grids");
      }
    }
  }

  const double n = static_cast<double>(records.size());
  EnsembleStats stats;
  stats.n_traj = records.size();
  stats.times = records[0].times;
  stats.mean_mu.resize(n_pts);
  stats.cov_mu.resize(n_pts);
  stats.stderr_mu.resize(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    double sx = 0.0, sp = 0.0, sxx = 0.0, sxp = 0.0, spp = 0.0;
    for (const auto& r : records) {
      const double x = r.mu[i].x;
      const double p = r.mu[i].p;
      sx += x;
      sp += p;
      sxx += x * x;
      sxp += x * p;
      spp += p * p;
    }
    const double mx = sx / n;
    const double mp = sp / n;
    const SymMat2 cov{(sxx - n * mx * mx) / (n - 1.0),
                      (sxp - n * mx * mp) / (n - 1.0),
                      (spp - n * mp * mp) / (n - 1.0)};
    stats.mean_mu[i] = Vec2{mx, mp};
    stats.cov_mu[i] = cov;
    stats.stderr_mu[i] = Vec2{std::sqrt(std::max(cov.xx, 0.0) / n),
                              std::sqrt(std::max(cov.pp, 0.0) / n)};
  }
  return stats;
}

EnsembleResult simulate_ensemble(Vec2 mu0, const CovTrajectory& sigma_path,
                                 const SystemMatrices& sys, double dt,
                                 const EnsembleOptions& options) {
  if (options.n_traj == 0) {
    throw InvalidArgumentError("simulate_ensemble: n_traj must be >= 1");
  }
  const GridInfo grid = check_grid(sigma_path, dt, options.record_stride);
  const kern::EmCoeffs co =
      make_coeffs(mu0, sys, dt, options.seed, options.zero_noise);
  const std::vector<double> sb = make_sigma_b(sigma_path, sys, grid.n_steps);
  const auto batch = kern::em_batch_fn(options.simd);

  const std::size_t n_keep = std::min<std::size_t>(options.keep_records,
                                                   options.n_traj);
  std::vector<double> cap_x(n_keep * grid.n_records);
  std::vector<double> cap_p(n_keep * grid.n_records);
  std::vector<double> cap_rx(n_keep * grid.n_records);
  std::vector<double> cap_rp(n_keep * grid.n_records);
  kern::EmCapture capture;
  capture.limit = n_keep;
  capture.n_records = grid.n_records;
  capture.mu_x = cap_x.data();
  capture.mu_p = cap_p.data();
  capture.r_x = cap_rx.data();
  capture.r_p = cap_rp.data();
  const kern::EmCapture* capture_ptr = n_keep > 0 ? &capture : nullptr;

  const std::size_t n_chunks = (options.n_traj + kChunkTraj - 1) / kChunkTraj;
  std::vector<kern::EnsembleAccum> chunk_accum(n_chunks);

  parallel_for_index(n_chunks, options.threads, [&](std::size_t ci) {
    auto& accum = chunk_accum[ci];
    accum.resize(grid.n_records);
    const std::uint64_t chunk_begin = ci * kChunkTraj;
    const std::uint64_t chunk_end =
        std::min<std::uint64_t>(chunk_begin + kChunkTraj, options.n_traj);
    for (std::uint64_t b = chunk_begin; b < chunk_end; b += kBatchTraj) {
      const std::uint32_t lanes =
          static_cast<std::uint32_t>(std::min<std::uint64_t>(
              kBatchTraj, chunk_end - b));
      batch(co, sb.data(), grid.n_steps, options.record_stride, b, lanes,
            &accum, capture_ptr);
    }
  });

  // Ordered merge: the reduction sequence is fixed by chunk index, so the
  // result does not depend on scheduling.
  kern::EnsembleAccum total;
  total.resize(grid.n_records);
  for (const auto& acc : chunk_accum) total.merge_from(acc);

  require_finite(total.sum_x, "ensemble sum");
  require_finite(total.sum_p, "ensemble sum");

  EnsembleResult result;
  auto& stats = result.stats;
  stats.n_traj = options.n_traj;
  stats.times = record_times(sigma_path, options.record_stride,
                             grid.n_records);
  stats.mean_mu.resize(grid.n_records);
  stats.cov_mu.resize(grid.n_records);
  stats.stderr_mu.resize(grid.n_records);
  const double n = static_cast<double>(options.n_traj);
  for (std::size_t i = 0; i < grid.n_records; ++i) {
    const double mx = total.sum_x[i] / n;
    const double mp = total.sum_p[i] / n;
    SymMat2 cov{0.0, 0.0, 0.0};
    if (options.n_traj >= 2) {
      cov = SymMat2{(total.sum_xx[i] - n * mx * mx) / (n - 1.0),
                    (total.sum_xp[i] - n * mx * mp) / (n - 1.0),
                    (total.sum_pp[i] - n * mp * mp) / (n - 1.0)};
    }
    stats.mean_mu[i] = Vec2{mx, mp};
    stats.cov_mu[i] = cov;
    stats.stderr_mu[i] =
        options.n_traj >= 2
            ? Vec2{std::sqrt(std::max(cov.xx, 0.0) / n),
                   std::sqrt(std::max(cov.pp, 0.0) / n)}
            : Vec2{0.0, 0.0};
  }

  result.records.resize(n_keep);
  const std::vector<double> times =
      record_times(sigma_path, options.record_stride, grid.n_records);
  for (std::size_t j = 0; j < n_keep; ++j) {
    auto& rec = result.records[j];
    rec.seed = options.seed;
    rec.traj_index = j;
    rec.times = times;
    rec.mu.resize(grid.n_records);
    rec.r_x.resize(grid.n_records);
    rec.r_p.resize(grid.n_records);
    const std::size_t row = j * grid.n_records;
    for (std::size_t i = 0; i < grid.n_records; ++i) {
      rec.mu[i] = Vec2{cap_x[row + i], cap_p[row + i]};
      rec.r_x[i] = cap_rx[row + i];
      rec.r_p[i] = cap_rp[row + i];
    }
  }
  return result;
}

void write_csv(const TrajectoryRecord& record, std::ostream& os) {
  std::string out = "t,mu_x,mu_p,R_x,R_p\n";
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    out += format_double(record.times[i]);
    out += ',';
    out += format_double(record.mu[i].x);
    out += ',';
    out += format_double(record.mu[i].p);
    out += ',';
    out += format_double(record.r_x[i]);
    out += ',';
    out += format_double(record.r_p[i]);
    out += '\n';
  }
  os << out;
}

void write_csv(const EnsembleStats& stats, std::ostream& os) {
  std::string out =
      "t,mean_mu_x,mean_mu_p,cov_xx,cov_xp,cov_pp,stderr_mu_x,stderr_mu_p\n";
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    out += format_double(stats.times[i]);
    out += ',';
    out += format_double(stats.mean_mu[i].x);
    out += ',';
    out += format_double(stats.mean_mu[i].p);
    out += ',';
    out += format_double(stats.cov_mu[i].xx);
    out += ',';
    out += format_double(stats.cov_mu[i].xp);
    out += ',';
    out += format_double(stats.cov_mu[i].pp);
    out += ',';
    out += format_double(stats.stderr_mu[i].x);
    out += ',';
    out += format_double(stats.stderr_mu[i].p);
    out += '\n';
  }
  os << out;
}

}  // namespace gaussmon
