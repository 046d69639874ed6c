#pragma once

// AVX2+FMA vector exp/log for packed doubles, Cephes-derived rational
// approximations (the same constants most SIMD math layers use). Accuracy
// is ~1-2 ulp over the supported ranges:
//   exp_pd: exact-contract range [-708.396, 709.0]; below -> 0, above -> +inf.
//   log_pd: positive normal doubles; 0 -> -inf, negative -> NaN.
// Denormal inputs to log_pd are not supported (never produced by callers:
// log_pd only sees log-sum-exp sums in [1, k]).

#include <immintrin.h>

#include <cmath>

namespace plmix::kernels::avx2 {

namespace detail {

inline __m256d polevl3(__m256d x, double c0, double c1, double c2) {
    __m256d p = _mm256_set1_pd(c0);
    p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c1));
    p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c2));
    return p;
}

inline __m256d polevl4(__m256d x, double c0, double c1, double c2, double c3) {
    __m256d p = _mm256_set1_pd(c0);
    p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c1));
    p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c2));
    p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c3));
    return p;
}

// int64 lanes (small magnitude) -> double lanes
inline __m256d cvt_small_i64_pd(__m256i v) {
    const __m256d magic = _mm256_set1_pd(0x1.0p52);
    __m256d d = _mm256_castsi256_pd(
        _mm256_add_epi64(v, _mm256_castpd_si256(magic)));
    return _mm256_sub_pd(d, magic);
}

}  // namespace detail

inline __m256d exp_pd(__m256d x) {
    const __m256d max_x = _mm256_set1_pd(709.0);
    const __m256d min_x = _mm256_set1_pd(-708.396418532264106224);

    const __m256d over = _mm256_cmp_pd(x, max_x, _CMP_GT_OS);
    const __m256d under = _mm256_cmp_pd(x, min_x, _CMP_LT_OS);
    __m256d xc = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

    // n = round(x / ln2), r = x - n*ln2 in two pieces
    const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), xc);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

    // exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2))
    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d p = detail::polevl3(rr, 1.26177193074810590878e-4,
                                3.02994407707441961300e-2,
                                9.99999999999999999910e-1);
    p = _mm256_mul_pd(p, r);
    __m256d q = detail::polevl4(rr, 3.00198505138664455042e-6,
                                2.52448340349684104192e-3,
                                2.27265548208155028766e-1,
                                2.00000000000000000005e0);
    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // scale by 2^n
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i pow2 = _mm256_slli_epi64(
        _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));

    e = _mm256_andnot_pd(under, e);
    e = _mm256_blendv_pd(e, _mm256_set1_pd(HUGE_VAL), over);
    return e;
}

inline __m256d log_pd(__m256d x) {
    const __m256i exp_mask = _mm256_set1_epi64x(0x7ffll << 52);
    const __m256i mant_mask = _mm256_set1_epi64x((1ll << 52) - 1);

    __m256i bits = _mm256_castpd_si256(x);
    __m256i biased = _mm256_srli_epi64(_mm256_and_si256(bits, exp_mask), 52);
    // fraction in [0.5, 1)
    __m256d frac = _mm256_castsi256_pd(_mm256_or_si256(
        _mm256_and_si256(bits, mant_mask), _mm256_set1_epi64x(1022ll << 52)));
    __m256d e = _mm256_sub_pd(detail::cvt_small_i64_pd(biased),
                              _mm256_set1_pd(1022.0));

    // renormalize to m in [sqrt(0.5), sqrt(2)); z = m - 1
    const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
    __m256d below = _mm256_cmp_pd(frac, sqrth, _CMP_LT_OS);
    e = _mm256_sub_pd(e, _mm256_and_pd(below, _mm256_set1_pd(1.0)));
    __m256d z = _mm256_sub_pd(
        _mm256_add_pd(frac, _mm256_and_pd(below, frac)), _mm256_set1_pd(1.0));

    __m256d zz = _mm256_mul_pd(z, z);
    __m256d p = _mm256_set1_pd(1.01875663804580931796e-4);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.97494994976747001425e-1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.70579119878881725854e0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.44989225341610930846e1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.79368678507819816313e1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(7.70838733755885391666e0));
    __m256d q = _mm256_add_pd(z, _mm256_set1_pd(1.12873587189167450590e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(4.52279145837532221105e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(8.29875266912776603211e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(7.11544750618563894466e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.31251620126765340583e1));

    __m256d y = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(zz, z), p), q);
    y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
    y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, y);
    __m256d res = _mm256_add_pd(z, y);
    res = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), res);

    // x <= 0: -inf at 0, NaN below; +inf passes through
    const __m256d zero = _mm256_setzero_pd();
    __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OS);
    __m256d is_neg = _mm256_cmp_pd(x, zero, _CMP_LT_OS);
    __m256d is_inf = _mm256_cmp_pd(x, _mm256_set1_pd(HUGE_VAL), _CMP_EQ_OS);
    res = _mm256_blendv_pd(res, _mm256_set1_pd(-HUGE_VAL), is_zero);
    res = _mm256_blendv_pd(res, _mm256_set1_pd(__builtin_nan("")), is_neg);
    res = _mm256_blendv_pd(res, _mm256_set1_pd(HUGE_VAL), is_inf);
    return res;
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmin_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace plmix::kernels::avx2
