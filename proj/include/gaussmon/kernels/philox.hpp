#pragma once

// Philox4x32-10 counter-based generator. A block is keyed by the user seed
// and indexed by (trajectory, step), so every draw is addressable: lane
// placement, batching and thread count cannot change the stream.
//
// Stream-splitting rule: key = (seed_lo, seed_hi), counter =
// (step_lo, step_hi, traj_lo, traj_hi). One block yields the two N(0,1)
// draws used by one Euler-Maruyama step of one trajectory.

#include <array>
#include <cstdint>

#include "gaussmon/kernels/packs.hpp"
#include "gaussmon/kernels/vmath.hpp"

namespace gaussmon::kern {

inline constexpr std::uint64_t kPhiloxM0 = 0xD2511F53ull;
inline constexpr std::uint64_t kPhiloxM1 = 0xCD9E8D57ull;
inline constexpr std::uint64_t kPhiloxW0 = 0x9E3779B9ull;
inline constexpr std::uint64_t kPhiloxW1 = 0xBB67AE85ull;
inline constexpr std::uint64_t kLo32 = 0xFFFFFFFFull;

/// One 128-bit block per lane; each word is a 32-bit value zero-extended
/// into a 64-bit lane so that mul32 sees clean operands.
template <class P>
struct PhiloxBlock {
  typename P::U x0, x1, x2, x3;
};

template <class P>
inline PhiloxBlock<P> philox4x32(PhiloxBlock<P> ctr, typename P::U key0,
                                 typename P::U key1) {
  using U = typename P::U;
  const U m0 = P::usplat(kPhiloxM0);
  const U m1 = P::usplat(kPhiloxM1);
  const U w0 = P::usplat(kPhiloxW0);
  const U w1 = P::usplat(kPhiloxW1);
  const U lo_mask = P::usplat(kLo32);

  for (int round = 0; round < 10; ++round) {
    const U p0 = P::mul32(ctr.x0, m0);
    const U p1 = P::mul32(ctr.x2, m1);
    const U hi0 = P::template srli<32>(p0);
    const U lo0 = P::uand(p0, lo_mask);
    const U hi1 = P::template srli<32>(p1);
    const U lo1 = P::uand(p1, lo_mask);
    const U n0 = P::uxor(P::uxor(hi1, ctr.x1), key0);
    const U n2 = P::uxor(P::uxor(hi0, ctr.x3), key1);
    ctr = {n0, lo1, n2, lo0};
    key0 = P::uand(P::uadd(key0, w0), lo_mask);
    key1 = P::uand(P::uadd(key1, w1), lo_mask);
  }
  return ctr;
}

/// Uniform in (0, 1), strictly inside, built from two 32-bit words.
template <class P>
inline typename P::F uniform_open01(typename P::U hi32, typename P::U lo32) {
  using U = typename P::U;
  const U joined = P::uor(P::template slli<32>(hi32), lo32);
  const U top52 = P::template srli<12>(joined);
  const typename P::F d = u52_to_double<P>(top52);
  // (k + 0.5) * 2^-52: exact operations, range [2^-53, 1 - 2^-53].
  return P::mul(P::add(d, P::fsplat(0.5)), P::fsplat(0x1p-52));
}

/// The two standard normal draws for (seed, trajectory, step), by Box-Muller.
template <class P>
inline void normal_pair(std::uint64_t seed, typename P::U traj_lo,
                        typename P::U traj_hi, std::uint64_t step,
                        typename P::F& z1, typename P::F& z2) {
  using F = typename P::F;
  PhiloxBlock<P> ctr{P::usplat(step & kLo32), P::usplat(step >> 32), traj_lo,
                     traj_hi};
  const auto out = philox4x32<P>(ctr, P::usplat(seed & kLo32),
                                 P::usplat(seed >> 32));
  const F u1 = uniform_open01<P>(out.x0, out.x1);
  const F u2 = uniform_open01<P>(out.x2, out.x3);
  const F r = P::sqrt(P::mul(P::fsplat(-2.0), vlog<P>(u1)));
  const F theta = P::mul(P::fsplat(6.283185307179586476925286766559), u2);
  F s, c;
  vsincos<P>(theta, s, c);
  z1 = P::mul(r, c);
  z2 = P::mul(r, s);
}

/// Scalar convenience for tests and single-trajectory callers.
inline std::array<std::uint32_t, 4> philox4x32_scalar(
    const std::array<std::uint32_t, 4>& ctr,
    const std::array<std::uint32_t, 2>& key) {
  using P = ScalarPack;
  PhiloxBlock<P> block{ctr[0], ctr[1], ctr[2], ctr[3]};
  const auto out = philox4x32<P>(block, key[0], key[1]);
  return {static_cast<std::uint32_t>(out.x0),
          static_cast<std::uint32_t>(out.x1),
          static_cast<std::uint32_t>(out.x2),
          static_cast<std::uint32_t>(out.x3)};
}

/// Scalar normal pair for (seed, traj, step); identical to the lane values
/// produced inside any batch.
inline void normal_pair_scalar(std::uint64_t seed, std::uint64_t traj,
                               std::uint64_t step, double& z1, double& z2) {
  using P = ScalarPack;
  P::F a, b;
  normal_pair<P>(seed, traj & kLo32, traj >> 32, step, a, b);
  z1 = a;
  z2 = b;
}

}  // namespace gaussmon::kern
