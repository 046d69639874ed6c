#include "plmix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plmix::kernels {
namespace {

double sum_exp_sq_scalar(std::span<const double> ys, double mu, double inv_two_var,
                         double offset) {
    double acc = 0.0;
    for (double y : ys) {
        const double d = y - mu;
        acc += std::exp(offset - d * d * inv_two_var);
    }
    return acc;
}

double min_sq_dist_scalar(std::span<const double> ys, double c) {
    double best = std::numeric_limits<double>::infinity();
    for (double y : ys) {
        const double d = y - c;
        best = std::min(best, d * d);
    }
    return best;
}

double mixture_loglik_sum_scalar(std::span<const double> ys, std::span<const double> mu,
                                 std::span<const double> inv_two_var,
                                 std::span<const double> coef) {
    const std::size_t k = mu.size();
    double acc = 0.0;
    for (double y : ys) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            const double d = y - mu[i];
            const double a = coef[i] - d * d * inv_two_var[i];
            m = std::max(m, a);
        }
        // all terms can hit -inf when every exponent overflows; the clamp
        // keeps (a - m) away from inf-inf so the point contributes -inf
        m = std::max(m, -std::numeric_limits<double>::max());
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = y - mu[i];
            s += std::exp(coef[i] - d * d * inv_two_var[i] - m);
        }
        acc += m + std::log(s);
    }
    return acc;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", &sum_exp_sq_scalar, &min_sq_dist_scalar,
                         &mixture_loglik_sum_scalar};
    return ops;
}

}  // namespace plmix::kernels
