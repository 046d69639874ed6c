#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "plmix/types.hpp"

namespace plmix {

/// Gaussian kernel density estimate: an n-component equal-weight Gaussian
/// mixture centered at the observations with common standard deviation h.
/// Immutable; copies share the sample and the lazily computed norms.
class KernelEstimate {
public:
    KernelEstimate(std::vector<double> sample, double bandwidth);

    std::span<const double> sample() const noexcept;
    double bandwidth() const noexcept;
    std::size_t size() const noexcept;

    /// ln f_hat(y), log-sum-exp over the kernel terms.
    double logpdf(double y) const;

    double pdf(double y) const { return std::exp(logpdf(y)); }

    /// <f_hat, g_c> in closed form:
    ///   (1/n) sum_t exp(-(Y_t-mu)^2/(2(sigma^2+h^2))) / sqrt(2 pi (sigma^2+h^2))
    double component_inner(const Component& c) const;

    /// ||f_hat||^2 over all O(n^2) kernel pairs. Lazy, cached.
    double l2_norm_sq() const;

    /// max_y f_hat(y): sample-point grid plus golden-section refinement
    /// around the best grid point. Lazy, cached.
    double sup_norm() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

/// Silverman's rule 0.9 * min(sd, IQR/1.34) * n^(-1/5) with the population
/// sd convention; a zero candidate falls back to the positive one. Throws
/// on an all-equal sample (zero spread).
double bandwidth_default(std::span<const double> sample);

}  // namespace plmix
