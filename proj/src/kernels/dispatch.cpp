#include <cstdlib>
#include <string>

#include "gaussmon/errors.hpp"
#include "gaussmon/kernels.hpp"

namespace gaussmon {

namespace kern {

void em_batch_scalar(const EmCoeffs&, const double*, std::size_t, std::size_t,
                     std::uint64_t, std::uint32_t, EnsembleAccum*,
                     const EmCapture*);
void steady_surface_scalar(const SteadyBatchParams&, const double*,
                           const double*, std::size_t,
                           const SteadySurfaceOut&);

#ifdef GAUSSMON_WITH_AVX2
void em_batch_avx2(const EmCoeffs&, const double*, std::size_t, std::size_t,
                   std::uint64_t, std::uint32_t, EnsembleAccum*,
                   const EmCapture*);
void steady_surface_avx2(const SteadyBatchParams&, const double*,
                         const double*, std::size_t, const SteadySurfaceOut&);
#endif

}  // namespace kern

bool avx2_available() {
#ifdef GAUSSMON_WITH_AVX2
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

SimdMode resolve_simd_mode(SimdMode requested) {
  if (requested == SimdMode::kAuto) {
    if (const char* env = std::getenv("GAUSSMON_SIMD")) {
      const std::string value(env);
      if (value == "scalar") {
        requested = SimdMode::kScalar;
      } else if (value == "avx2") {
        requested = SimdMode::kAvx2;
      } else if (!value.empty() && value != "auto") {
        throw InvalidArgumentError("GAUSSMON_SIMD must be auto, scalar or avx2");
      }
    }
  }
  if (requested == SimdMode::kAuto) {
    return avx2_available() ? SimdMode::kAvx2 : SimdMode::kScalar;
  }
  if (requested == SimdMode::kAvx2 && !avx2_available()) {
    throw InvalidArgumentError("AVX2 kernels are not available on this host");
  }
  return requested;
}

const char* simd_mode_name(SimdMode mode) {
  switch (mode) {
    case SimdMode::kScalar:
      return "scalar";
    case SimdMode::kAvx2:
      return "avx2";
    default:
      return "auto";
  }
}

namespace kern {

EmBatchFn em_batch_fn(SimdMode mode) {
  mode = resolve_simd_mode(mode);
#ifdef GAUSSMON_WITH_AVX2
  if (mode == SimdMode::kAvx2) return &em_batch_avx2;
#endif
  return &em_batch_scalar;
}

SteadySurfaceFn steady_surface_fn(SimdMode mode) {
  mode = resolve_simd_mode(mode);
#ifdef GAUSSMON_WITH_AVX2
  if (mode == SimdMode::kAvx2) return &steady_surface_avx2;
#endif
  return &steady_surface_scalar;
}

}  // namespace kern
}  // namespace gaussmon
