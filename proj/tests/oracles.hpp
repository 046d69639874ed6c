#pragma once

// Test-side oracles, independent of the library's computation paths:
// adaptive Simpson quadrature, brute-force simplex grids, and direct
// summation references. Everything here favors transparency over speed.

#include <Eigen/Core>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "plmix/rng.hpp"
#include "plmix/types.hpp"

namespace plmix::oracles {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// The first forced_depth levels always subdivide.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13, int forced_depth = 6);

/// Quadrature over consecutive breakpoint pairs; use knots at the
/// integrand's structure so nothing is missed by the coarse probes.
double integrate_segmented(const std::function<double(double)>& f,
                           std::vector<double> breakpoints, double tol = 1e-13);

/// Integration window that captures all Gaussian mass of the given
/// components (12 standard deviations past the extreme means).
std::pair<double, double> support_window(std::span<const Component> comps);

/// Breakpoints covering the components' structure inside support_window.
std::vector<double> gaussian_breakpoints(std::span<const Component> comps);

/// Quadrature value of <g_a, g_b>.
double inner_product_quad(const Component& a, const Component& b);

/// Quadrature value of integral of f^2 for a density given in log form.
double l2_norm_sq_quad(const std::function<double(double)>& logpdf, double lo, double hi);

/// Brute-force minimum of w'Kw - 2c'w over the simplex grid with the given
/// step (compositions of 1/step among k coordinates).
double grid_min_quadratic(const Eigen::MatrixXd& gram, const Eigen::VectorXd& cross,
                          double step);

/// Direct-summation mixture log-density (long double accumulation).
double mixture_logpdf_direct(std::span<const Component> comps,
                             std::span<const double> weights, double y);

/// Direct-summation kernel-estimate density (independent of the library).
double kde_pdf_direct(std::span<const double> ys, double h, double y);

/// Random simplex-projection instance: k components with moderate sigmas
/// plus a random target mixture (1..4 Gaussians, simplex weights), so the
/// cross vector and const term have consistent L2 geometry.
struct ProjectionInstance {
    std::vector<Component> components;
    std::vector<Component> target_components;
    std::vector<double> target_weights;
    Eigen::MatrixXd gram;
    Eigen::VectorXd cross;
    double target_norm_sq;
};
ProjectionInstance random_projection_instance(Rng& rng, std::size_t k,
                                              bool allow_duplicates = false);

/// Breakpoints covering every kernel bump of a kernel estimate.
std::vector<double> kde_breakpoints(std::span<const double> ys, double h);

}  // namespace plmix::oracles
