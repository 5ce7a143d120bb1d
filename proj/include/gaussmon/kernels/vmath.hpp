#pragma once

// Lane-generic natural log and sin/cos. The trajectory kernel cannot call
// libm: results must be bit-identical between the scalar and SIMD paths and
// across libm versions, so the polynomial kernels live here. Coefficients
// are the classic fdlibm minimax sets; accuracy is a few ulp on the reduced
// ranges, which the math tests pin against libm.

#include "gaussmon/kernels/packs.hpp"

namespace gaussmon::kern {

/// ln(x) for x in (0, 1); x must be a positive normal double.
template <class P>
inline typename P::F vlog(typename P::F x) {
  using F = typename P::F;
  using U = typename P::U;

  const U bits = P::bitcast_u(x);
  const U exp_field = P::template srli<52>(bits);
  const U mant = P::uand(bits, P::usplat(0x000FFFFFFFFFFFFFull));
  F m = P::bitcast_f(P::uor(mant, P::usplat(0x3FF0000000000000ull)));
  F e = P::sub(u52_to_double<P>(exp_field), P::fsplat(1023.0));

  // Renormalize m into (sqrt(2)/2, sqrt(2)].
  const F big = P::cmp_gt(m, P::fsplat(1.41421356237309514547));
  m = P::blend(big, P::mul(m, P::fsplat(0.5)), m);
  e = P::blend(big, P::add(e, P::fsplat(1.0)), e);

  const F f = P::sub(m, P::fsplat(1.0));
  const F s = P::div(f, P::add(P::fsplat(2.0), f));
  const F z = P::mul(s, s);
  const F w = P::mul(z, z);

  const F lg1 = P::fsplat(6.666666666666735130e-01);
  const F lg2 = P::fsplat(3.999999999940941908e-01);
  const F lg3 = P::fsplat(2.857142874366239149e-01);
  const F lg4 = P::fsplat(2.222219843214978396e-01);
  const F lg5 = P::fsplat(1.818357216161805012e-01);
  const F lg6 = P::fsplat(1.531383769920937332e-01);
  const F lg7 = P::fsplat(1.479819860511658591e-01);

  const F t1 =
      P::mul(w, P::add(lg2, P::mul(w, P::add(lg4, P::mul(w, lg6)))));
  const F t2 = P::mul(
      z, P::add(lg1, P::mul(w, P::add(lg3, P::mul(w, P::add(lg5,
                                                    P::mul(w, lg7)))))));
  const F r = P::add(t2, t1);
  const F hfsq = P::mul(P::fsplat(0.5), P::mul(f, f));

  const F ln2_hi = P::fsplat(6.93147180369123816490e-01);
  const F ln2_lo = P::fsplat(1.90821492927058770002e-10);
  // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
  const F corr = P::add(P::mul(s, P::add(hfsq, r)), P::mul(e, ln2_lo));
  return P::sub(P::mul(e, ln2_hi), P::sub(P::sub(hfsq, corr), f));
}

/// sin(x) and cos(x) for x in [0, 2*pi).
template <class P>
inline void vsincos(typename P::F x, typename P::F& sin_out,
                    typename P::F& cos_out) {
  using F = typename P::F;

  // Quadrant index in {0,...,4}; 4 behaves as 0 after reduction.
  const F kd = P::round_even(P::mul(x, P::fsplat(6.36619772367581382433e-01)));
  // Cody-Waite with a 33-bit leading pi/2 so kd*pio2_1 stays exact.
  const F pio2_1 = P::fsplat(1.57079632673412561417e+00);
  const F pio2_1t = P::fsplat(6.07710050650619224932e-11);
  const F r = P::sub(P::sub(x, P::mul(kd, pio2_1)), P::mul(kd, pio2_1t));

  const F z = P::mul(r, r);

  const F s1 = P::fsplat(-1.66666666666666324348e-01);
  const F s2 = P::fsplat(8.33333333332248946124e-03);
  const F s3 = P::fsplat(-1.98412698298579493134e-04);
  const F s4 = P::fsplat(2.75573137070700676789e-06);
  const F s5 = P::fsplat(-2.50507602534068634195e-08);
  const F s6 = P::fsplat(1.58969099521155010221e-10);
  const F sr = P::add(
      s2, P::mul(z, P::add(s3, P::mul(z, P::add(s4, P::mul(z, P::add(
                                                    s5, P::mul(z, s6))))))));
  const F v = P::mul(z, r);
  const F sin_r = P::add(r, P::mul(v, P::add(s1, P::mul(z, sr))));

  const F c1 = P::fsplat(4.16666666666666019037e-02);
  const F c2 = P::fsplat(-1.38888888888741095749e-03);
  const F c3 = P::fsplat(2.48015872894767294178e-05);
  const F c4 = P::fsplat(-2.75573143513906633035e-07);
  const F c5 = P::fsplat(2.08757232129817482790e-09);
  const F c6 = P::fsplat(-1.13596475577881948265e-11);
  const F cr = P::mul(
      z, P::add(c1, P::mul(z, P::add(c2, P::mul(z, P::add(c3, P::mul(
                                                    z, P::add(c4,
                                                       P::mul(z, P::add(
                                                           c5, P::mul(
                                                               z, c6)))))))))));
  const F hz = P::mul(P::fsplat(0.5), z);
  const F cos_r = P::sub(P::fsplat(1.0), P::sub(hz, P::mul(z, cr)));

  const F is1 = P::cmp_eq(kd, P::fsplat(1.0));
  const F is2 = P::cmp_eq(kd, P::fsplat(2.0));
  const F is3 = P::cmp_eq(kd, P::fsplat(3.0));
  const F swap = P::bor(is1, is3);
  const F sin_neg = P::bor(is2, is3);
  const F cos_neg = P::bor(is1, is2);

  const F sign = P::fsplat(-0.0);
  const F s_base = P::blend(swap, cos_r, sin_r);
  const F c_base = P::blend(swap, sin_r, cos_r);
  sin_out = P::bxor(s_base, P::band(sin_neg, sign));
  cos_out = P::bxor(c_base, P::band(cos_neg, sign));
}

}  // namespace gaussmon::kern
