#include "plmix/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "plmix/gaussian.hpp"
#include "plmix/kernels.hpp"
#include "plmix/stats.hpp"

namespace plmix {

struct KernelEstimate::State {
    std::vector<double> ys;
    double h = 0.0;

    mutable std::once_flag l2_once;
    mutable double l2_norm_sq = 0.0;
    mutable std::once_flag sup_once;
    mutable double sup_norm = 0.0;
};

KernelEstimate::KernelEstimate(std::vector<double> sample, double bandwidth)
    : state_(std::make_shared<State>()) {
    if (sample.size() < 2) {
        throw std::invalid_argument("KernelEstimate requires n >= 2 observations");
    }
    for (double y : sample) {
        if (!std::isfinite(y)) {
            throw std::invalid_argument("KernelEstimate sample values must be finite");
        }
    }
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("KernelEstimate bandwidth must be positive and finite");
    }
    state_->ys = std::move(sample);
    state_->h = bandwidth;
}

std::span<const double> KernelEstimate::sample() const noexcept { return state_->ys; }
double KernelEstimate::bandwidth() const noexcept { return state_->h; }
std::size_t KernelEstimate::size() const noexcept { return state_->ys.size(); }

double KernelEstimate::logpdf(double y) const {
    const auto& ys = state_->ys;
    const double h = state_->h;
    const double itv = 1.0 / (2.0 * h * h);
    const double shift = kernels::min_sq_dist(ys, y) * itv;
    const double s = kernels::sum_exp_sq(ys, y, itv, shift);
    return -std::log(static_cast<double>(ys.size())) - kLogSqrt2Pi - std::log(h) - shift +
           std::log(s);
}

double KernelEstimate::component_inner(const Component& c) const {
    validate(c);
    const auto& ys = state_->ys;
    const double v = c.sigma * c.sigma + state_->h * state_->h;
    const double s = kernels::sum_exp_sq(ys, c.mu, 1.0 / (2.0 * v), 0.0);
    return s / (static_cast<double>(ys.size()) * std::sqrt(2.0 * M_PI * v));
}

double KernelEstimate::l2_norm_sq() const {
    std::call_once(state_->l2_once, [&] {
        const auto& ys = state_->ys;
        const double h = state_->h;
        const double itv = 1.0 / (4.0 * h * h);
        double total = 0.0;
        for (double yt : ys) total += kernels::sum_exp_sq(ys, yt, itv, 0.0);
        const double n = static_cast<double>(ys.size());
        state_->l2_norm_sq = total / (n * n * std::sqrt(4.0 * M_PI * h * h));
    });
    return state_->l2_norm_sq;
}

double KernelEstimate::sup_norm() const {
    std::call_once(state_->sup_once, [&] {
        const auto& ys = state_->ys;
        double best_x = ys.front();
        double best = -std::numeric_limits<double>::infinity();
        for (double yt : ys) {
            const double v = logpdf(yt);
            if (v > best) {
                best = v;
                best_x = yt;
            }
        }
        // golden-section ascent around the best knot
        const double gr = 0.61803398874989484820;
        double a = best_x - state_->h;
        double b = best_x + state_->h;
        double x1 = b - gr * (b - a);
        double x2 = a + gr * (b - a);
        double f1 = logpdf(x1);
        double f2 = logpdf(x2);
        for (int it = 0; it < 80 && (b - a) > 1e-12 * (1.0 + std::abs(best_x)); ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = logpdf(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = logpdf(x1);
            }
        }
        state_->sup_norm = std::exp(std::max(best, std::max(f1, f2)));
    });
    return state_->sup_norm;
}

double bandwidth_default(std::span<const double> sample) {
    if (sample.size() < 2) {
        throw std::invalid_argument("bandwidth_default requires n >= 2");
    }
    const double sd = population_sd(sample);
    const std::vector<double> sorted = sorted_copy(sample);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double iqr_scaled = iqr / 1.34;

    double spread;
    if (sd > 0.0 && iqr_scaled > 0.0) {
        spread = std::min(sd, iqr_scaled);
    } else if (sd > 0.0) {
        spread = sd;
    } else {
        throw std::invalid_argument("bandwidth_default: sample has zero spread");
    }
    return 0.9 * spread *
           std::pow(static_cast<double>(sample.size()), -0.2);
}

}  // namespace plmix
