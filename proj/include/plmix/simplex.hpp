#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "plmix/kde.hpp"
#include "plmix/types.hpp"

namespace plmix {

/// The quadratic expansion of ||target - w g||^2 = w'Kw - 2c'w + const:
/// Gram matrix K of the components, cross vector c of target-component
/// inner products, and optionally ||target||^2 (needed only to report
/// distances, not to find the minimizer).
struct QuadraticProjection {
    Eigen::MatrixXd gram;
    Eigen::VectorXd cross;
    std::optional<double> const_term;

    QuadraticProjection(Eigen::MatrixXd k, Eigen::VectorXd c,
                        std::optional<double> norm_sq = std::nullopt);

    Eigen::Index k() const noexcept { return gram.rows(); }

    /// w'Kw - 2c'w
    double objective(const Eigen::VectorXd& w) const;
};

/// One feasible equality-KKT candidate encountered during active-set
/// enumeration (exposed so tests can check projected-density uniqueness
/// across tied minimizers).
struct SimplexCandidate {
    std::vector<double> weights;
    double objective;
    double kkt_residual;
};

/// All feasible candidates from the 2^k - 1 active-set enumeration.
std::vector<SimplexCandidate> enumerate_kkt_candidates(const QuadraticProjection& q);

/// Exact minimizer of w'Kw - 2c'w over the simplex by active-set
/// enumeration. Ties (singular K) resolve to the minimum-Euclidean-norm
/// minimizer; the projected density is unique regardless. The result
/// carries its active set and a scaled KKT residual certificate.
/// Throws on k > 16 (enumeration guard) or a non-symmetric Gram.
WeightVector solve_simplex(const QuadraticProjection& q);

/// Assembles the projection of the kernel estimate onto the span of the
/// components and solves for the simplex weights.
WeightVector weights_for(const KernelEstimate& e, std::span<const Component> p);

/// QuadraticProjection for projecting the kernel estimate onto components
/// p. with_const also computes ||f_hat||^2 (O(n^2), cached in e).
QuadraticProjection make_projection(const KernelEstimate& e, std::span<const Component> p,
                                    bool with_const = false);

/// Unconstrained solve Kw = c (the direct Gram-inverse estimate). May
/// leave the simplex; diagnostics only. Throws when cond(K) > 1e12.
Eigen::VectorXd weights_unconstrained(const QuadraticProjection& q);

/// True when w is not a simplex point within tolerance.
bool out_of_simplex(const Eigen::VectorXd& w, double tol = 1e-9);

/// ||target - w g|| = sqrt(max(0, w'Kw - 2c'w + const)). Requires const_term.
double projection_distance(const QuadraticProjection& q, std::span<const double> w);

}  // namespace plmix
