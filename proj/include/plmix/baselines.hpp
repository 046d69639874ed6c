#pragma once

#include "plmix/likelihood.hpp"

namespace plmix {

struct EMConfig {
    std::size_t max_iters = 500;
    double tol = 1e-9;            // average log-likelihood increment stop
    double variance_floor = 0.0;  // sigma floor; <= 0 means 1e-6 * sample sd
    std::size_t restarts = 4;
    std::uint64_t seed = 1;
};

/// Standard EM for a univariate Gaussian mixture, best of quantile-anchored
/// randomized restarts. The observed-data average log-likelihood is
/// non-decreasing per iteration; the winning restart's sequence is returned
/// in FitResult.trace. Throws when n < k.
FitResult em_fit(std::span<const double> data, std::size_t k, const EMConfig& cfg);

/// Pure minimum-L2-distance estimator: minimizes
///   d_n(theta) = min_{w in S_k} ||f_hat - w g(theta)||
/// over (mu_i, ln sigma_i) with the same multi-start machinery as
/// maximize(). objective_value stores -d_n(theta_hat) so larger is better
/// across estimators.
FitResult l2_fit(const KernelEstimate& e, std::size_t k, const OptimizerConfig& cfg);

}  // namespace plmix
