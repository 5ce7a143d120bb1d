#pragma once

// Closed-form stationary covariance, evaluated lane-generically. This is the
// single implementation behind steady_state_covariance (width 1) and the
// sweep surface kernels (width 1 and 4), so a surface row and a point
// evaluation are bit-identical.

#include "gaussmon/kernels/packs.hpp"

namespace gaussmon::kern {

template <class P>
struct GreekEval {
  typename P::F alpha, beta, gamma, delta;
};

/// alpha = -m w^2 sqrt(w_c/u_c), beta = (1/m) sqrt(u_c/w_c),
/// gamma = sqrt(h24 k_p k_x eta_x + beta^2), delta = sqrt(h24 k_x k_p eta_p
/// + alpha^2), with u_c = eta_x k_x and w_c = eta_p k_p.
template <class P>
inline GreekEval<P> greek_eval(typename P::F m, typename P::F omega,
                               typename P::F h24, typename P::F eta_x,
                               typename P::F eta_p, typename P::F k_x,
                               typename P::F k_p) {
  using F = typename P::F;
  const F u = P::mul(eta_x, k_x);
  const F w = P::mul(eta_p, k_p);
  const F mw2 = P::mul(m, P::mul(omega, omega));
  const F alpha = P::sub(P::fsplat(0.0), P::mul(mw2, P::sqrt(P::div(w, u))));
  const F beta = P::div(P::sqrt(P::div(u, w)), m);
  const F kk = P::mul(k_p, k_x);
  const F gamma =
      P::sqrt(P::add(P::mul(P::mul(h24, kk), eta_x), P::mul(beta, beta)));
  const F delta =
      P::sqrt(P::add(P::mul(P::mul(h24, kk), eta_p), P::mul(alpha, alpha)));
  return {alpha, beta, gamma, delta};
}

template <class P>
struct SteadyEval {
  typename P::F alpha, beta, gamma, delta;
  typename P::F sin_th, cos_th;
  typename P::F v_x, c, v_p;
  typename P::F d, p;
  typename P::F resid_rel;  // ARE residual relative to the equation's
                            // largest term magnitude (>= the largest Q
                            // entry, so a wrong formula still reads O(1))
};

template <class P>
inline SteadyEval<P> steady_eval(typename P::F m, typename P::F omega,
                                 typename P::F h24, typename P::F eta_x,
                                 typename P::F eta_p, typename P::F k_x,
                                 typename P::F k_p) {
  using F = typename P::F;
  SteadyEval<P> out;

  const GreekEval<P> g = greek_eval<P>(m, omega, h24, eta_x, eta_p, k_x, k_p);
  out.alpha = g.alpha;
  out.beta = g.beta;
  out.gamma = g.gamma;
  out.delta = g.delta;

  const F u = P::mul(eta_x, k_x);
  const F w = P::mul(eta_p, k_p);
  const F kk = P::mul(k_p, k_x);
  const F abs_alpha = P::sub(P::fsplat(0.0), g.alpha);
  const F gpd = P::add(g.gamma, g.delta);

  // sin(th) = (alpha - beta)/(gamma + delta) can approach -1; 1 + sin(th)
  // is formed from gamma - beta and delta - |alpha| via the difference of
  // squares, which keeps cos(th) fully accurate in the collapsed corners.
  out.sin_th = P::div(P::sub(g.alpha, g.beta), gpd);
  const F gamma_m_beta =
      P::div(P::mul(P::mul(h24, kk), eta_x), P::add(g.gamma, g.beta));
  const F delta_m_alpha =
      P::div(P::mul(P::mul(h24, kk), eta_p), P::add(g.delta, abs_alpha));
  const F one_p_s = P::div(P::add(gamma_m_beta, delta_m_alpha), gpd);
  const F one_m_s =
      P::div(P::add(P::add(g.gamma, g.beta), P::add(g.delta, abs_alpha)), gpd);
  out.cos_th = P::sqrt(P::mul(one_m_s, one_p_s));

  out.v_x = P::div(P::mul(g.gamma, out.cos_th), u);
  out.v_p = P::div(P::mul(g.delta, out.cos_th), w);
  // beta*delta - |alpha|*gamma cancels catastrophically near the
  // zero-correlation ratio; multiply by the conjugate so the difference of
  // squares collapses to beta^2 eta_p - alpha^2 eta_x, a single subtraction
  // of well-scaled products.
  const F conj = P::add(P::mul(g.beta, g.delta), P::mul(abs_alpha, g.gamma));
  const F balance = P::sub(P::mul(P::mul(g.beta, g.beta), eta_p),
                           P::mul(P::mul(g.alpha, g.alpha), eta_x));
  out.c = P::div(P::mul(P::mul(h24, kk), balance),
                 P::mul(conj, P::mul(gpd, P::sqrt(P::mul(u, w)))));

  // d = (hbar^2/4) tr(chi B Sigma B)/tr(B Sigma B); the traces reduce to
  // k_x v_x + k_p v_p and eta_x k_x v_x + eta_p k_p v_p.
  const F tr_chi = P::add(P::mul(k_x, out.v_x), P::mul(k_p, out.v_p));
  const F tr_b = P::add(P::mul(u, out.v_x), P::mul(w, out.v_p));
  out.d = P::div(P::mul(h24, tr_chi), tr_b);
  out.p = P::sqrt(P::div(tr_b, tr_chi));

  // Residual of Sigma A + A^T Sigma - Sigma B B^T Sigma + Q, entrywise.
  const F mw2 = P::mul(m, P::mul(omega, omega));
  const F inv_m = P::div(P::fsplat(1.0), m);
  const F q11 = P::mul(h24, k_p);
  const F q22 = P::mul(h24, k_x);

  const F drift_xx = P::mul(P::fsplat(2.0), P::mul(out.c, inv_m));
  const F pump_xx = P::add(P::mul(u, P::mul(out.v_x, out.v_x)),
                           P::mul(w, P::mul(out.c, out.c)));
  const F r11 = P::add(P::sub(drift_xx, pump_xx), q11);

  const F drift_a = P::mul(out.v_p, inv_m);
  const F drift_b = P::mul(mw2, out.v_x);
  const F pump_xp = P::mul(out.c, tr_b);
  const F r12 = P::sub(P::sub(drift_a, drift_b), pump_xp);

  const F drift_pp = P::mul(P::fsplat(2.0), P::mul(mw2, out.c));
  const F pump_pp = P::add(P::mul(u, P::mul(out.c, out.c)),
                           P::mul(w, P::mul(out.v_p, out.v_p)));
  const F r22 =
      P::add(P::sub(P::sub(P::fsplat(0.0), drift_pp), pump_pp), q22);

  const F abs_mask = P::bitcast_f(P::usplat(0x7FFFFFFFFFFFFFFFull));
  const auto vmax = [](F a, F b) { return P::blend(P::cmp_gt(a, b), a, b); };
  const auto vabs = [abs_mask](F a) { return P::band(a, abs_mask); };

  const F worst = vmax(vabs(r11), vmax(vabs(r12), vabs(r22)));
  // Certifiable scale: the largest addend feeding the residual. One ulp of
  // any Sigma entry already moves the residual by eps times this, so a
  // bound relative to anything smaller cannot hold in double precision.
  F scale = vmax(q11, q22);
  scale = vmax(scale, vmax(vabs(drift_xx), pump_xx));
  scale = vmax(scale, vmax(vabs(drift_a), vabs(drift_b)));
  scale = vmax(scale, vmax(vabs(pump_xp), vabs(drift_pp)));
  scale = vmax(scale, pump_pp);
  out.resid_rel = P::div(worst, scale);

  return out;
}

}  // namespace gaussmon::kern
