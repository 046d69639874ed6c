#pragma once

#include <cstddef>
#include <span>

// Batch arithmetic kernels behind the density/likelihood code paths.
// Scalar reference implementations always exist; on x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it. Variants agree
// with the scalar reference to ~1e-14 relative (different summation order,
// polynomial exp/log), which every caller tolerance dominates.

namespace plmix::kernels {

// Sum over the sample of shifted Gaussian exponents:
//   sum_t exp(offset - (ys[t] - mu)^2 * inv_two_var)
// Log-sum-exp callers pick offset so the largest exponent is zero;
// offset = 0 gives the plain kernel-vs-component cross sums.
using SumExpSqFn = double (*)(std::span<const double> ys, double mu,
                              double inv_two_var, double offset);

// min_t (ys[t] - c)^2, the log-sum-exp shift for KDE evaluation.
using MinSqDistFn = double (*)(std::span<const double> ys, double c);

// sum_t logsumexp_i(coef[i] - (ys[t] - mu[i])^2 * inv_two_var[i]) for a
// small component count k (positive-weight components only). coef[i] packs
// ln w_i - ln(sqrt(2 pi) sigma_i). Finite for finite inputs.
using MixtureLoglikSumFn = double (*)(std::span<const double> ys,
                                      std::span<const double> mu,
                                      std::span<const double> inv_two_var,
                                      std::span<const double> coef);

struct Ops {
    const char* name;
    SumExpSqFn sum_exp_sq;
    MinSqDistFn min_sq_dist;
    MixtureLoglikSumFn mixture_loglik_sum;
};

/// Scalar reference kernels (std::exp / std::log).
const Ops& scalar_ops();

/// AVX2+FMA kernels, or nullptr when unavailable (build or CPU).
const Ops* avx2_ops();

/// The active dispatch table. Resolved once: AVX2 when the CPU supports
/// it, else scalar. The PLMIX_ISA environment variable ("scalar"/"avx2")
/// overrides the automatic choice.
const Ops& active();

/// Test hook: force a specific table (pass nullptr to restore automatic).
void force(const Ops* ops);

inline double sum_exp_sq(std::span<const double> ys, double mu, double inv_two_var,
                         double offset = 0.0) {
    return active().sum_exp_sq(ys, mu, inv_two_var, offset);
}

inline double min_sq_dist(std::span<const double> ys, double c) {
    return active().min_sq_dist(ys, c);
}

inline double mixture_loglik_sum(std::span<const double> ys, std::span<const double> mu,
                                 std::span<const double> inv_two_var,
                                 std::span<const double> coef) {
    return active().mixture_loglik_sum(ys, mu, inv_two_var, coef);
}

}  // namespace plmix::kernels
