#pragma once

// Euler-Maruyama batch kernel for the conditional-mean SDE and the
// integrated readouts. A batch is four trajectories; the scalar reference
// walks the four lanes one at a time while the AVX2 variant steps them in
// parallel. Per-slot accumulation order (lane 0..3) is the same in both, so
// ensemble sums are bit-identical across paths and thread counts.

#include <cstddef>
#include <cstdint>

#include "gaussmon/kernels.hpp"
#include "gaussmon/kernels/philox.hpp"

namespace gaussmon::kern {

inline constexpr std::size_t kBatchWidth = 4;

template <class P>
inline void em_run_lanes(const EmCoeffs& co, const double* sigma_b,
                         std::size_t n_steps, std::size_t record_stride,
                         std::uint64_t first_traj, std::uint32_t n_lanes,
                         EnsembleAccum* accum, const EmCapture* capture) {
  using F = typename P::F;
  using U = typename P::U;
  constexpr int w = P::kWidth;

  std::uint64_t lane_lo[w];
  std::uint64_t lane_hi[w];
  for (int l = 0; l < w; ++l) {
    const std::uint64_t traj = first_traj + static_cast<std::uint64_t>(l);
    lane_lo[l] = traj & kLo32;
    lane_hi[l] = traj >> 32;
  }
  const U traj_lo = P::uload(lane_lo);
  const U traj_hi = P::uload(lane_hi);

  const F at11 = P::fsplat(co.at11);
  const F at12 = P::fsplat(co.at12);
  const F at21 = P::fsplat(co.at21);
  const F at22 = P::fsplat(co.at22);
  const F dt = P::fsplat(co.dt);
  const F sqrt_dt = P::fsplat(co.sqrt_dt);
  const F rx_scale = P::fsplat(co.rx_scale);
  const F rp_scale = P::fsplat(co.rp_scale);
  const F zero = P::fsplat(0.0);

  F mu_x = P::fsplat(co.mu0_x);
  F mu_p = P::fsplat(co.mu0_p);
  F r_x = zero;
  F r_p = zero;

  double out_x[w], out_p[w], out_rx[w], out_rp[w];
  const auto record = [&](std::size_t idx) {
    P::fstore(out_x, mu_x);
    P::fstore(out_p, mu_p);
    P::fstore(out_rx, r_x);
    P::fstore(out_rp, r_p);
    for (std::uint32_t l = 0; l < n_lanes && l < w; ++l) {
      const std::uint64_t traj = first_traj + l;
      if (accum != nullptr) {
        accum->sum_x[idx] += out_x[l];
        accum->sum_p[idx] += out_p[l];
        accum->sum_xx[idx] += out_x[l] * out_x[l];
        accum->sum_xp[idx] += out_x[l] * out_p[l];
        accum->sum_pp[idx] += out_p[l] * out_p[l];
      }
      if (capture != nullptr && traj >= capture->base &&
          traj < capture->limit) {
        const std::size_t row =
            static_cast<std::size_t>(traj - capture->base) *
            capture->n_records;
        capture->mu_x[row + idx] = out_x[l];
        capture->mu_p[row + idx] = out_p[l];
        capture->r_x[row + idx] = out_rx[l];
        capture->r_p[row + idx] = out_rp[l];
      }
    }
  };

  record(0);
  for (std::size_t n = 0; n < n_steps; ++n) {
    F dw_x = zero;
    F dw_p = zero;
    if (!co.zero_noise) {
      F z1, z2;
      normal_pair<P>(co.seed, traj_lo, traj_hi, n, z1, z2);
      dw_x = P::mul(z1, sqrt_dt);
      dw_p = P::mul(z2, sqrt_dt);
    }
    const double* sb = sigma_b + 4 * n;
    const F sb11 = P::fsplat(sb[0]);
    const F sb12 = P::fsplat(sb[1]);
    const F sb21 = P::fsplat(sb[2]);
    const F sb22 = P::fsplat(sb[3]);

    const F drift_x = P::mul(P::add(P::mul(at11, mu_x), P::mul(at12, mu_p)),
                             dt);
    const F drift_p = P::mul(P::add(P::mul(at21, mu_x), P::mul(at22, mu_p)),
                             dt);
    const F noise_x = P::add(P::mul(sb11, dw_x), P::mul(sb12, dw_p));
    const F noise_p = P::add(P::mul(sb21, dw_x), P::mul(sb22, dw_p));

    // Readouts integrate the pre-update mean and reuse the same increments.
    r_x = P::add(r_x, P::add(P::mul(mu_x, dt), P::mul(dw_x, rx_scale)));
    r_p = P::add(r_p, P::add(P::mul(mu_p, dt), P::mul(dw_p, rp_scale)));

    mu_x = P::add(P::add(mu_x, drift_x), noise_x);
    mu_p = P::add(P::add(mu_p, drift_p), noise_p);

    if ((n + 1) % record_stride == 0) record((n + 1) / record_stride);
  }
}

/// One batch of four trajectories. The scalar instantiation simulates the
/// lanes sequentially so that every accumulator slot sees lane values in
/// the same order as the vector path.
template <class P>
inline void em_batch(const EmCoeffs& co, const double* sigma_b,
                     std::size_t n_steps, std::size_t record_stride,
                     std::uint64_t first_traj, std::uint32_t n_lanes,
                     EnsembleAccum* accum, const EmCapture* capture) {
  constexpr std::uint32_t w = static_cast<std::uint32_t>(P::kWidth);
  for (std::uint32_t l = 0; l < n_lanes; l += w) {
    const std::uint32_t lanes_here = (n_lanes - l < w) ? (n_lanes - l) : w;
    em_run_lanes<P>(co, sigma_b, n_steps, record_stride, first_traj + l,
                    lanes_here, accum, capture);
  }
}

}  // namespace gaussmon::kern
