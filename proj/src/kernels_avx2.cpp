#include "plmix/kernels.hpp"

#if defined(PLMIX_KERNELS_AVX2)

#include <algorithm>
#include <cmath>
#include <limits>

#include "vec_math_avx2.hpp"

namespace plmix::kernels {
namespace {

using avx2::exp_pd;
using avx2::hmin_pd;
using avx2::hsum_pd;
using avx2::log_pd;

double sum_exp_sq_avx2(std::span<const double> ys, double mu, double inv_two_var,
                       double offset) {
    const std::size_t n = ys.size();
    const double* y = ys.data();
    const __m256d vmu = _mm256_set1_pd(mu);
    const __m256d vitv = _mm256_set1_pd(inv_two_var);
    const __m256d voff = _mm256_set1_pd(offset);

    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 8 <= n; t += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(y + t), vmu);
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(y + t + 4), vmu);
        __m256d a0 = _mm256_fnmadd_pd(_mm256_mul_pd(d0, d0), vitv, voff);
        __m256d a1 = _mm256_fnmadd_pd(_mm256_mul_pd(d1, d1), vitv, voff);
        acc0 = _mm256_add_pd(acc0, exp_pd(a0));
        acc1 = _mm256_add_pd(acc1, exp_pd(a1));
    }
    for (; t + 4 <= n; t += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y + t), vmu);
        acc0 = _mm256_add_pd(acc0, exp_pd(_mm256_fnmadd_pd(_mm256_mul_pd(d, d), vitv, voff)));
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; t < n; ++t) {
        const double d = y[t] - mu;
        acc += std::exp(offset - d * d * inv_two_var);
    }
    return acc;
}

double min_sq_dist_avx2(std::span<const double> ys, double c) {
    const std::size_t n = ys.size();
    const double* y = ys.data();
    const __m256d vc = _mm256_set1_pd(c);
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y + t), vc);
        vbest = _mm256_min_pd(vbest, _mm256_mul_pd(d, d));
    }
    double best = hmin_pd(vbest);
    for (; t < n; ++t) {
        const double d = y[t] - c;
        best = std::min(best, d * d);
    }
    return best;
}

double mixture_loglik_sum_avx2(std::span<const double> ys, std::span<const double> mu,
                               std::span<const double> inv_two_var,
                               std::span<const double> coef) {
    const std::size_t n = ys.size();
    const std::size_t k = mu.size();
    if (k == 0 || k > 16) {
        return scalar_ops().mixture_loglik_sum(ys, mu, inv_two_var, coef);
    }
    const double* y = ys.data();

    __m256d vmu[16], vitv[16], vcoef[16];
    for (std::size_t i = 0; i < k; ++i) {
        vmu[i] = _mm256_set1_pd(mu[i]);
        vitv[i] = _mm256_set1_pd(inv_two_var[i]);
        vcoef[i] = _mm256_set1_pd(coef[i]);
    }

    __m256d vacc = _mm256_setzero_pd();
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        const __m256d vy = _mm256_loadu_pd(y + t);
        __m256d vm = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < k; ++i) {
            __m256d d = _mm256_sub_pd(vy, vmu[i]);
            __m256d a = _mm256_fnmadd_pd(_mm256_mul_pd(d, d), vitv[i], vcoef[i]);
            vm = _mm256_max_pd(vm, a);
        }
        // keep (a - m) away from inf-inf when every exponent overflowed
        vm = _mm256_max_pd(vm, _mm256_set1_pd(-std::numeric_limits<double>::max()));
        __m256d vs = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; ++i) {
            __m256d d = _mm256_sub_pd(vy, vmu[i]);
            __m256d a = _mm256_fnmadd_pd(_mm256_mul_pd(d, d), vitv[i], vcoef[i]);
            vs = _mm256_add_pd(vs, exp_pd(_mm256_sub_pd(a, vm)));
        }
        vacc = _mm256_add_pd(vacc, _mm256_add_pd(vm, log_pd(vs)));
    }
    double acc = hsum_pd(vacc);
    for (; t < n; ++t) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            const double d = y[t] - mu[i];
            m = std::max(m, coef[i] - d * d * inv_two_var[i]);
        }
        m = std::max(m, -std::numeric_limits<double>::max());
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = y[t] - mu[i];
            s += std::exp(coef[i] - d * d * inv_two_var[i] - m);
        }
        acc += m + std::log(s);
    }
    return acc;
}

}  // namespace

const Ops* avx2_ops() {
    static const Ops ops{"avx2", &sum_exp_sq_avx2, &min_sq_dist_avx2,
                         &mixture_loglik_sum_avx2};
    return &ops;
}

}  // namespace plmix::kernels

#else

namespace plmix::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace plmix::kernels

#endif
