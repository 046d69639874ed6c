#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace plmix {

/// One Gaussian mixture component. `sigma` is the standard deviation
/// (the closed-form inner products only hold under that reading).
struct Component {
    double mu = 0.0;
    double sigma = 1.0;

    bool valid() const noexcept;

    friend bool operator==(const Component&, const Component&) = default;
};

void validate(const Component& c);

/// Ordered set of components: the canonical representative of a parameter
/// equivalence class, sorted by mu with ties broken by sigma. Duplicate
/// components are legal and retained.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::vector<Component> components);

    std::size_t size() const noexcept { return components_.size(); }
    const Component& operator[](std::size_t i) const noexcept { return components_[i]; }
    const std::vector<Component>& components() const noexcept { return components_; }

    operator std::span<const Component>() const noexcept { return components_; }

    auto begin() const noexcept { return components_.begin(); }
    auto end() const noexcept { return components_.end(); }

    /// Permutation applied during canonicalization: sorted index i came
    /// from raw index order()[i]. Lets callers co-permute weights.
    const std::vector<std::size_t>& order() const noexcept { return order_; }

    /// Equality of the canonical representatives (the permutation that
    /// produced them does not matter).
    friend bool operator==(const ParamVector& a, const ParamVector& b) {
        return a.components_ == b.components_;
    }

private:
    std::vector<Component> components_;
    std::vector<std::size_t> order_;
};

/// Stable sort of raw components into natural order. Throws
/// std::invalid_argument on an empty sequence or invalid components.
ParamVector canonicalize(std::span<const Component> raw);

/// Point of the simplex S_k plus the solver's certificate metadata.
/// Hand-built vectors carry kkt_residual = +inf (no certificate).
struct WeightVector {
    std::vector<double> weights;
    std::vector<std::size_t> active_set;
    double kkt_residual = std::numeric_limits<double>::infinity();

    WeightVector() = default;
    /// Validates non-negativity and sum == 1 within 1e-12, then fills
    /// active_set from the positive entries.
    explicit WeightVector(std::vector<double> w);

    std::size_t size() const noexcept { return weights.size(); }
    double operator[](std::size_t i) const noexcept { return weights[i]; }
};

/// A fully specified mixture density: components plus simplex weights.
struct MixtureDensity {
    ParamVector params;
    WeightVector weights;

    MixtureDensity() = default;
    MixtureDensity(ParamVector p, WeightVector w);

    /// Builds from components in arbitrary order; weights are co-permuted
    /// with the canonical sort so pairs stay attached.
    static MixtureDensity from_raw(std::span<const Component> components,
                                   std::span<const double> weights);

    std::size_t size() const noexcept { return params.size(); }
};

/// Hausdorff distance between two component sets under the Euclidean norm
/// on (mu, sigma). Zero iff the sets coincide; sizes may differ.
double hausdorff(std::span<const Component> p, std::span<const Component> q);

}  // namespace plmix
