#pragma once

// Runtime kernel dispatch. Two data-parallel inner loops have SIMD variants:
// the Euler-Maruyama ensemble step and the steady-state surface evaluation.
// The scalar builds are the reference; the AVX2 builds are selected at
// runtime when the CPU supports them and are bit-identical to the reference
// (asserted by the equivalence tests). GAUSSMON_SIMD=scalar|avx2|auto
// overrides the automatic choice.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gaussmon {

enum class SimdMode {
  kAuto,
  kScalar,
  kAvx2,
};

/// True if this build has the AVX2 kernels and the CPU can run them.
bool avx2_available();

/// Applies the environment override and hardware detection to kAuto;
/// throws InvalidArgumentError if an explicitly requested mode is
/// unavailable.
SimdMode resolve_simd_mode(SimdMode requested);

const char* simd_mode_name(SimdMode mode);

namespace kern {

/// Step-invariant coefficients of the mean SDE discretization.
struct EmCoeffs {
  double at11 = 0.0, at12 = 0.0, at21 = 0.0, at22 = 0.0;  // A^T, row-major
  double dt = 0.0;
  double sqrt_dt = 0.0;
  double rx_scale = 0.0;  // 1/sqrt(eta_x k_x)
  double rp_scale = 0.0;  // 1/sqrt(eta_p k_p)
  double mu0_x = 0.0;
  double mu0_p = 0.0;
  std::uint64_t seed = 0;
  bool zero_noise = false;  // test hook: dW == 0
};

/// Running sums per record point. Merging chunk accumulators in a fixed
/// order keeps ensemble statistics byte-deterministic under parallelism.
struct EnsembleAccum {
  std::vector<double> sum_x, sum_p, sum_xx, sum_xp, sum_pp;

  void resize(std::size_t n_records) {
    sum_x.assign(n_records, 0.0);
    sum_p.assign(n_records, 0.0);
    sum_xx.assign(n_records, 0.0);
    sum_xp.assign(n_records, 0.0);
    sum_pp.assign(n_records, 0.0);
  }
  void merge_from(const EnsembleAccum& other) {
    for (std::size_t i = 0; i < sum_x.size(); ++i) {
      sum_x[i] += other.sum_x[i];
      sum_p[i] += other.sum_p[i];
      sum_xx[i] += other.sum_xx[i];
      sum_xp[i] += other.sum_xp[i];
      sum_pp[i] += other.sum_pp[i];
    }
  }
};

/// Optional per-trajectory series capture for trajectories with index in
/// [base, limit). Buffers are row-major [trajectory - base][record].
struct EmCapture {
  std::uint64_t base = 0;
  std::uint64_t limit = 0;
  std::size_t n_records = 0;
  double* mu_x = nullptr;
  double* mu_p = nullptr;
  double* r_x = nullptr;
  double* r_p = nullptr;
};

using EmBatchFn = void (*)(const EmCoeffs& co, const double* sigma_b,
                           std::size_t n_steps, std::size_t record_stride,
                           std::uint64_t first_traj, std::uint32_t n_lanes,
                           EnsembleAccum* accum, const EmCapture* capture);

/// Fixed parameters of a steady-state surface evaluation.
struct SteadyBatchParams {
  double m = 1.0;
  double omega = 1.0;
  double h24 = 1.0;  // hbar^2/4
  double eta_x = 1.0;
  double eta_p = 1.0;
};

/// Output arrays, all of length n.
struct SteadySurfaceOut {
  double* v_x = nullptr;
  double* c = nullptr;
  double* v_p = nullptr;
  double* d = nullptr;
  double* p = nullptr;
  double* resid_rel = nullptr;
};

using SteadySurfaceFn = void (*)(const SteadyBatchParams& params,
                                 const double* k_x, const double* k_p,
                                 std::size_t n, const SteadySurfaceOut& out);

EmBatchFn em_batch_fn(SimdMode mode);
SteadySurfaceFn steady_surface_fn(SimdMode mode);

}  // namespace kern
}  // namespace gaussmon
