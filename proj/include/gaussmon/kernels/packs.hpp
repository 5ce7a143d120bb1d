#pragma once

// Lane-width abstraction for the arithmetic kernels. Every kernel is written
// once against this interface and instantiated twice: ScalarPack (width 1,
// the reference path) and Avx2Pack (width 4, compiled only in the AVX2
// translation unit). Both instantiations execute the identical sequence of
// IEEE operations, so their results are bit-identical; the equivalence tests
// assert exactly that.

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace gaussmon::kern {

struct ScalarPack {
  static constexpr int kWidth = 1;
  using F = double;
  using U = std::uint64_t;

  static F fsplat(double v) { return v; }
  static U usplat(std::uint64_t v) { return v; }
  static F fload(const double* p) { return *p; }
  static U uload(const std::uint64_t* p) { return *p; }
  static void fstore(double* p, F v) { *p = v; }

  static F add(F a, F b) { return a + b; }
  static F sub(F a, F b) { return a - b; }
  static F mul(F a, F b) { return a * b; }
  static F div(F a, F b) { return a / b; }
  static F sqrt(F a) { return std::sqrt(a); }
  static F round_even(F a) { return std::nearbyint(a); }

  static U bitcast_u(F a) {
    U u;
    std::memcpy(&u, &a, sizeof(u));
    return u;
  }
  static F bitcast_f(U u) {
    F f;
    std::memcpy(&f, &u, sizeof(f));
    return f;
  }

  static U uand(U a, U b) { return a & b; }
  static U uor(U a, U b) { return a | b; }
  static U uxor(U a, U b) { return a ^ b; }
  static U uadd(U a, U b) { return a + b; }
  template <int N>
  static U srli(U a) {
    return a >> N;
  }
  template <int N>
  static U slli(U a) {
    return a << N;
  }
  /// Full 64-bit product of the low 32 bits of each lane.
  static U mul32(U a, U b) {
    return static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) *
           static_cast<std::uint32_t>(b);
  }

  // Masks are all-ones / all-zeros bit patterns carried in F lanes.
  static F cmp_gt(F a, F b) {
    return bitcast_f(a > b ? ~std::uint64_t{0} : std::uint64_t{0});
  }
  static F cmp_eq(F a, F b) {
    return bitcast_f(a == b ? ~std::uint64_t{0} : std::uint64_t{0});
  }
  static F bor(F a, F b) { return bitcast_f(bitcast_u(a) | bitcast_u(b)); }
  static F band(F a, F b) { return bitcast_f(bitcast_u(a) & bitcast_u(b)); }
  static F bxor(F a, F b) { return bitcast_f(bitcast_u(a) ^ bitcast_u(b)); }
  /// Lane-wise select: mask bits on -> a, off -> b. Masks are full-width.
  static F blend(F mask, F a, F b) {
    const U m = bitcast_u(mask);
    return bitcast_f((bitcast_u(a) & m) | (bitcast_u(b) & ~m));
  }
};

#if defined(__AVX2__)

struct Avx2Pack {
  static constexpr int kWidth = 4;
  using F = __m256d;
  using U = __m256i;

  static F fsplat(double v) { return _mm256_set1_pd(v); }
  static U usplat(std::uint64_t v) {
    return _mm256_set1_epi64x(static_cast<long long>(v));
  }
  static F fload(const double* p) { return _mm256_loadu_pd(p); }
  static U uload(const std::uint64_t* p) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
  }
  static void fstore(double* p, F v) { _mm256_storeu_pd(p, v); }

  static F add(F a, F b) { return _mm256_add_pd(a, b); }
  static F sub(F a, F b) { return _mm256_sub_pd(a, b); }
  static F mul(F a, F b) { return _mm256_mul_pd(a, b); }
  static F div(F a, F b) { return _mm256_div_pd(a, b); }
  static F sqrt(F a) { return _mm256_sqrt_pd(a); }
  static F round_even(F a) {
    return _mm256_round_pd(a, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  }

  static U bitcast_u(F a) { return _mm256_castpd_si256(a); }
  static F bitcast_f(U u) { return _mm256_castsi256_pd(u); }

  static U uand(U a, U b) { return _mm256_and_si256(a, b); }
  static U uor(U a, U b) { return _mm256_or_si256(a, b); }
  static U uxor(U a, U b) { return _mm256_xor_si256(a, b); }
  static U uadd(U a, U b) { return _mm256_add_epi64(a, b); }
  template <int N>
  static U srli(U a) {
    return _mm256_srli_epi64(a, N);
  }
  template <int N>
  static U slli(U a) {
    return _mm256_slli_epi64(a, N);
  }
  static U mul32(U a, U b) { return _mm256_mul_epu32(a, b); }

  static F cmp_gt(F a, F b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
  static F cmp_eq(F a, F b) { return _mm256_cmp_pd(a, b, _CMP_EQ_OQ); }
  static F bor(F a, F b) { return _mm256_or_pd(a, b); }
  static F band(F a, F b) { return _mm256_and_pd(a, b); }
  static F bxor(F a, F b) { return _mm256_xor_pd(a, b); }
  static F blend(F mask, F a, F b) {
    // Masks produced by cmp_* are all-ones per lane, so bitwise select
    // matches the scalar path exactly.
    return _mm256_or_pd(_mm256_and_pd(mask, a), _mm256_andnot_pd(mask, b));
  }
};

#endif  // __AVX2__

/// double(u) for integer-valued u < 2^52, via the exponent-bias trick.
template <class P>
inline typename P::F u52_to_double(typename P::U u) {
  const typename P::U magic = P::usplat(0x4330000000000000ull);  // 2^52
  const typename P::F shifted = P::bitcast_f(P::uor(u, magic));
  return P::sub(shifted, P::fsplat(4503599627370496.0));
}

}  // namespace gaussmon::kern
