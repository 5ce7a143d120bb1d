#include "gaussmon/kernels.hpp"
#include "gaussmon/kernels/em_core.hpp"
#include "gaussmon/kernels/steady_core.hpp"

namespace gaussmon::kern {

void em_batch_scalar(const EmCoeffs& co, const double* sigma_b,
                     std::size_t n_steps, std::size_t record_stride,
                     std::uint64_t first_traj, std::uint32_t n_lanes,
                     EnsembleAccum* accum, const EmCapture* capture) {
  em_batch<ScalarPack>(co, sigma_b, n_steps, record_stride, first_traj,
                       n_lanes, accum, capture);
}

void steady_surface_scalar(const SteadyBatchParams& params, const double* k_x,
                           const double* k_p, std::size_t n,
                           const SteadySurfaceOut& out) {
  using P = ScalarPack;
  for (std::size_t i = 0; i < n; ++i) {
    const SteadyEval<P> e =
        steady_eval<P>(params.m, params.omega, params.h24, params.eta_x,
                       params.eta_p, k_x[i], k_p[i]);
    out.v_x[i] = e.v_x;
    out.c[i] = e.c;
    out.v_p[i] = e.v_p;
    out.d[i] = e.d;
    out.p[i] = e.p;
    out.resid_rel[i] = e.resid_rel;
  }
}

}  // namespace gaussmon::kern
