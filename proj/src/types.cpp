#include "plmix/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace plmix {

bool Component::valid() const noexcept {
    return std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0;
}

void validate(const Component& c) {
    if (!c.valid()) {
        throw std::invalid_argument("Component requires finite mu and finite sigma > 0");
    }
}

ParamVector::ParamVector(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw std::invalid_argument("ParamVector requires at least one component");
    }
    for (const Component& c : components_) validate(c);

    order_.resize(components_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        const Component& x = components_[a];
        const Component& y = components_[b];
        if (x.mu != y.mu) return x.mu < y.mu;
        return x.sigma < y.sigma;
    });
    std::vector<Component> sorted(components_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) sorted[i] = components_[order_[i]];
    components_ = std::move(sorted);
}

ParamVector canonicalize(std::span<const Component> raw) {
    return ParamVector(std::vector<Component>(raw.begin(), raw.end()));
}

WeightVector::WeightVector(std::vector<double> w) : weights(std::move(w)) {
    if (weights.empty()) {
        throw std::invalid_argument("WeightVector requires at least one entry");
    }
    double sum = 0.0;
    for (double wi : weights) {
        if (!std::isfinite(wi) || wi < 0.0) {
            throw std::invalid_argument("weights must be finite and non-negative");
        }
        sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("weights must sum to 1 within 1e-12");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) active_set.push_back(i);
    }
    if (active_set.empty()) {
        throw std::invalid_argument("weight vector has no positive entry");
    }
}

MixtureDensity::MixtureDensity(ParamVector p, WeightVector w)
    : params(std::move(p)), weights(std::move(w)) {
    if (params.size() != weights.size()) {
        throw std::invalid_argument("params and weights lengths disagree");
    }
}

MixtureDensity MixtureDensity::from_raw(std::span<const Component> components,
                                        std::span<const double> weights) {
    if (components.size() != weights.size()) {
        throw std::invalid_argument("params and weights lengths disagree");
    }
    ParamVector p = canonicalize(components);
    std::vector<double> w(weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weights[p.order()[i]];
    return MixtureDensity(std::move(p), WeightVector(std::move(w)));
}

namespace {

double sq_dist(const Component& a, const Component& b) {
    const double dm = a.mu - b.mu;
    const double ds = a.sigma - b.sigma;
    return dm * dm + ds * ds;
}

double directed_hausdorff_sq(std::span<const Component> p, std::span<const Component> q) {
    double worst = 0.0;
    for (const Component& a : p) {
        double best = std::numeric_limits<double>::infinity();
        for (const Component& b : q) best = std::min(best, sq_dist(a, b));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double hausdorff(std::span<const Component> p, std::span<const Component> q) {
    if (p.empty() || q.empty()) {
        throw std::invalid_argument("hausdorff requires non-empty component sets");
    }
    return std::sqrt(std::max(directed_hausdorff_sq(p, q), directed_hausdorff_sq(q, p)));
}

}  // namespace plmix
