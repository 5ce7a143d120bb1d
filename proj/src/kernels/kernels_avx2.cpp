// Compiled with -mavx2; keep every include behind that assumption local to
// this translation unit.

#include "gaussmon/kernels.hpp"
#include "gaussmon/kernels/em_core.hpp"
#include "gaussmon/kernels/steady_core.hpp"

namespace gaussmon::kern {

void em_batch_avx2(const EmCoeffs& co, const double* sigma_b,
                   std::size_t n_steps, std::size_t record_stride,
                   std::uint64_t first_traj, std::uint32_t n_lanes,
                   EnsembleAccum* accum, const EmCapture* capture) {
  em_batch<Avx2Pack>(co, sigma_b, n_steps, record_stride, first_traj, n_lanes,
                     accum, capture);
}

void steady_surface_avx2(const SteadyBatchParams& params, const double* k_x,
                         const double* k_p, std::size_t n,
                         const SteadySurfaceOut& out) {
  using P = Avx2Pack;
  const P::F m = P::fsplat(params.m);
  const P::F omega = P::fsplat(params.omega);
  const P::F h24 = P::fsplat(params.h24);
  const P::F eta_x = P::fsplat(params.eta_x);
  const P::F eta_p = P::fsplat(params.eta_p);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const SteadyEval<P> e = steady_eval<P>(m, omega, h24, eta_x, eta_p,
                                           P::fload(k_x + i),
                                           P::fload(k_p + i));
    P::fstore(out.v_x + i, e.v_x);
    P::fstore(out.c + i, e.c);
    P::fstore(out.v_p + i, e.v_p);
    P::fstore(out.d + i, e.d);
    P::fstore(out.p + i, e.p);
    P::fstore(out.resid_rel + i, e.resid_rel);
  }
  // Tail lanes run the width-1 instantiation; same operation sequence,
  // same results.
  for (; i < n; ++i) {
    using S = ScalarPack;
    const SteadyEval<S> e =
        steady_eval<S>(params.m, params.omega, params.h24, params.eta_x,
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
