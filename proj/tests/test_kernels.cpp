#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <doctest.h>

#include "gaussmon/kernels.hpp"
#include "gaussmon/kernels/philox.hpp"
#include "gaussmon/kernels/steady_core.hpp"
#include "gaussmon/kernels/vmath.hpp"

using namespace gaussmon;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Zero counter / zero key, the canonical reference block.
  auto out = kern::philox4x32_scalar({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = kern::philox4x32_scalar({0xffffffffu, 0xffffffffu, 0xffffffffu,
                                 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = kern::philox4x32_scalar({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("vlog matches libm on (0,1)") {
  using P = kern::ScalarPack;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    double x = u(rng);
    if (x <= 0.0) continue;
    if (i % 7 == 0) x = std::ldexp(x, -40);  // exercise small inputs
    const double mine = kern::vlog<P>(x);
    const double ref = std::log(x);
    worst = std::max(worst,
                     std::fabs(mine - ref) / std::max(1e-300, std::fabs(ref)));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("vsincos matches libm on [0, 2pi)") {
  using P = kern::ScalarPack;
  std::mt19937_64 rng(409);
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = u(rng);
    double s, c;
    kern::vsincos<P>(x, s, c);
    worst = std::max(worst, std::fabs(s - std::sin(x)));
    worst = std::max(worst, std::fabs(c - std::cos(x)));
  }
  // Boundary-ish points near the quadrant switches.
  for (int k = 0; k <= 8; ++k) {
    const double x = k * 0.7853981633974483;
    double s, c;
    kern::vsincos<P>(x, s, c);
    worst = std::max(worst, std::fabs(s - std::sin(x)));
    worst = std::max(worst, std::fabs(c - std::cos(x)));
  }
  CHECK(worst < 4e-16);
}

TEST_CASE("normal pairs have the right first moments") {
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z1, z2;
    kern::normal_pair_scalar(42, 7, static_cast<std::uint64_t>(i), z1, z2);
    sum += z1 + z2;
    sum2 += z1 * z1 + z2 * z2;
  }
  const double mean = sum / (2.0 * n);
  const double var = sum2 / (2.0 * n) - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(2.0 * n));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / (2.0 * n)));
}

TEST_CASE("normal draws are addressable: same (seed,traj,step) twice") {
  double a1, a2, b1, b2;
  kern::normal_pair_scalar(99, 123456789ull, 987654321ull, a1, a2);
  kern::normal_pair_scalar(99, 123456789ull, 987654321ull, b1, b2);
  CHECK(a1 == b1);
  CHECK(a2 == b2);
  // Different trajectory, different draw.
  kern::normal_pair_scalar(99, 123456790ull, 987654321ull, b1, b2);
  CHECK(a1 != b1);
}

namespace {

kern::EmCoeffs demo_coeffs(std::uint64_t seed) {
  kern::EmCoeffs co;
  co.at11 = 0.0;
  co.at12 = 1.0;
  co.at21 = -1.0;
  co.at22 = 0.0;
  co.dt = 1e-3;
  co.sqrt_dt = std::sqrt(1e-3);
  co.rx_scale = 1.0 / std::sqrt(0.1);
  co.rp_scale = 1.0 / std::sqrt(0.9);
  co.mu0_x = 1.0;
  co.mu0_p = 0.0;
  co.seed = seed;
  co.zero_noise = false;
  return co;
}

std::vector<double> demo_sigma_b(std::size_t n_steps) {
  std::vector<double> sb(4 * n_steps);
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double w = 1.0 + 0.1 * std::sin(0.01 * static_cast<double>(n));
    sb[4 * n + 0] = w;
    sb[4 * n + 1] = 0.05;
    sb[4 * n + 2] = 0.05;
    sb[4 * n + 3] = 1.0 / w;
  }
  return sb;
}

}  // namespace

TEST_CASE("scalar and AVX2 ensemble kernels are bit-identical") {
  if (!avx2_available()) {
    MESSAGE("AVX2 unavailable; scalar-only host");
    return;
  }
  const std::size_t n_steps = 512;
  const std::size_t n_records = n_steps / 8 + 1;
  const auto co = demo_coeffs(31415);
  const auto sb = demo_sigma_b(n_steps);

  const auto run = [&](SimdMode mode) {
    kern::EnsembleAccum accum;
    accum.resize(n_records);
    std::vector<double> cap(4 * 6 * n_records, 0.0);
    kern::EmCapture capture;
    capture.base = 0;
    capture.limit = 6;  // spans one full batch and half of the next
    capture.n_records = n_records;
    capture.mu_x = cap.data();
    capture.mu_p = cap.data() + 6 * n_records;
    capture.r_x = cap.data() + 12 * n_records;
    capture.r_p = cap.data() + 18 * n_records;
    const auto batch = kern::em_batch_fn(mode);
    batch(co, sb.data(), n_steps, 8, 0, 4, &accum, &capture);
    batch(co, sb.data(), n_steps, 8, 4, 3, &accum, &capture);  // partial
    return std::pair(accum, cap);
  };

  const auto [acc_s, cap_s] = run(SimdMode::kScalar);
  const auto [acc_v, cap_v] = run(SimdMode::kAvx2);

  CHECK(std::memcmp(acc_s.sum_x.data(), acc_v.sum_x.data(),
                    acc_s.sum_x.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(acc_s.sum_xx.data(), acc_v.sum_xx.data(),
                    acc_s.sum_xx.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(acc_s.sum_xp.data(), acc_v.sum_xp.data(),
                    acc_s.sum_xp.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(acc_s.sum_pp.data(), acc_v.sum_pp.data(),
                    acc_s.sum_pp.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(cap_s.data(), cap_v.data(),
                    cap_s.size() * sizeof(double)) == 0);
}

TEST_CASE("scalar and AVX2 surface kernels are bit-identical") {
  if (!avx2_available()) {
    MESSAGE("AVX2 unavailable; scalar-only host");
    return;
  }
  const std::size_t n = 1003;  // forces a vector tail
  std::vector<double> k_x(n), k_p(n);
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    k_x[i] = std::pow(10.0, u(rng));
    k_p[i] = std::pow(10.0, u(rng));
  }
  const kern::SteadyBatchParams params{1.0, 1.0, 1.0, 0.1, 0.9};

  const auto run = [&](SimdMode mode) {
    std::vector<double> out(6 * n);
    kern::SteadySurfaceOut o{out.data(),         out.data() + n,
                             out.data() + 2 * n, out.data() + 3 * n,
                             out.data() + 4 * n, out.data() + 5 * n};
    kern::steady_surface_fn(mode)(params, k_x.data(), k_p.data(), n, o);
    return out;
  };

  const auto scalar = run(SimdMode::kScalar);
  const auto avx2 = run(SimdMode::kAvx2);
  CHECK(std::memcmp(scalar.data(), avx2.data(),
                    scalar.size() * sizeof(double)) == 0);
}

TEST_CASE("simd mode resolution and naming") {
  CHECK(std::string(simd_mode_name(SimdMode::kScalar)) == "scalar");
  CHECK(resolve_simd_mode(SimdMode::kScalar) == SimdMode::kScalar);
  const SimdMode any = resolve_simd_mode(SimdMode::kAuto);
  CHECK((any == SimdMode::kScalar || any == SimdMode::kAvx2));
}

TEST_CASE("GAUSSMON_SIMD overrides automatic dispatch") {
  ::setenv("GAUSSMON_SIMD", "scalar", 1);
  CHECK(resolve_simd_mode(SimdMode::kAuto) == SimdMode::kScalar);
  ::setenv("GAUSSMON_SIMD", "bogus", 1);
  CHECK_THROWS(resolve_simd_mode(SimdMode::kAuto));
  // Explicit requests bypass the environment.
  CHECK(resolve_simd_mode(SimdMode::kScalar) == SimdMode::kScalar);
  ::unsetenv("GAUSSMON_SIMD");
  const SimdMode any = resolve_simd_mode(SimdMode::kAuto);
  CHECK((any == SimdMode::kScalar || any == SimdMode::kAvx2));
}
