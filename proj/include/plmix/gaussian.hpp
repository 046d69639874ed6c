#pragma once

#include <Eigen/Core>

#include "plmix/types.hpp"

namespace plmix {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2 pi)

/// Log-density of one Gaussian component at y. Stays in the log domain,
/// so it cannot overflow for finite inputs.
double gauss_logpdf(const Component& c, double y);

inline double gauss_pdf(const Component& c, double y) {
    return std::exp(gauss_logpdf(c, y));
}

/// L2 inner product of two Gaussian densities,
///   <g_a, g_b> = exp(-(mu_a-mu_b)^2 / (2(s_a^2+s_b^2))) / sqrt(2 pi (s_a^2+s_b^2)).
/// In particular <g, g> = 1/(2 sqrt(pi) sigma).
double inner_product(const Component& a, const Component& b);

/// k x k Gram matrix of pairwise inner products. Symmetric PSD.
Eigen::MatrixXd gram_matrix(std::span<const Component> p);

/// Mixed Gram block: entry (i, j) = <p_i, q_j>.
Eigen::MatrixXd cross_gram(std::span<const Component> p, std::span<const Component> q);

/// ln sum_i w_i g_i(y) by log-sum-exp over the positive-weight terms.
/// Finite for any finite y.
double mixture_logpdf(const MixtureDensity& m, double y);

}  // namespace plmix
