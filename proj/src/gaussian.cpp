#include "plmix/gaussian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plmix {

double gauss_logpdf(const Component& c, double y) {
    const double z = (y - c.mu) / c.sigma;  // ratio first: sigma^2 may underflow
    return -kLogSqrt2Pi - std::log(c.sigma) - 0.5 * z * z;
}

double inner_product(const Component& a, const Component& b) {
    const double v = a.sigma * a.sigma + b.sigma * b.sigma;
    const double d = a.mu - b.mu;
    return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
}

Eigen::MatrixXd gram_matrix(std::span<const Component> p) {
    const Eigen::Index k = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd gram(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            const double v = inner_product(p[static_cast<std::size_t>(i)],
                                           p[static_cast<std::size_t>(j)]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

Eigen::MatrixXd cross_gram(std::span<const Component> p, std::span<const Component> q) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(p.size()),
                        static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                inner_product(p[i], q[j]);
        }
    }
    return out;
}

double mixture_logpdf(const MixtureDensity& m, double y) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i : m.weights.active_set) {
        best = std::max(best, std::log(m.weights[i]) + gauss_logpdf(m.params[i], y));
    }
    if (!(best > -std::numeric_limits<double>::infinity())) {
        throw std::domain_error("mixture_logpdf: no positive-weight term");
    }
    double s = 0.0;
    for (std::size_t i : m.weights.active_set) {
        s += std::exp(std::log(m.weights[i]) + gauss_logpdf(m.params[i], y) - best);
    }
    return best + std::log(s);
}

}  // namespace plmix
