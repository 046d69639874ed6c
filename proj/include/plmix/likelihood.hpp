#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plmix/kde.hpp"
#include "plmix/simplex.hpp"
#include "plmix/types.hpp"

namespace plmix {

/// The pseudo-likelihood objective: the kernel estimate supplies the
/// simplex weights, and the log-likelihood is averaged over the same
/// sample the estimate was built from.
class Objective {
public:
    Objective(KernelEstimate estimate, std::size_t k);

    const KernelEstimate& estimate() const noexcept { return estimate_; }
    std::span<const double> data() const noexcept { return estimate_.sample(); }
    std::size_t k() const noexcept { return k_; }

private:
    KernelEstimate estimate_;
    std::size_t k_;
};

struct OptimizerConfig {
    std::size_t starts = 8;
    double xtol = 1e-6;
    std::size_t max_evals = 0;  // per start; 0 means 20000 * k
    std::uint64_t seed = 1;
    bool em_warm_start = false;
    bool record_trace = false;
    /// Extra user-supplied starting points, appended to the generated set.
    std::vector<ParamVector> extra_starts;
};

struct StartSummary {
    double initial_value;
    double final_value;
    std::size_t evals;
};

struct FitResult {
    ParamVector theta_hat;
    WeightVector weights;
    double objective_value = 0.0;
    std::size_t n_evaluations = 0;
    std::size_t starts = 0;
    std::vector<std::pair<std::size_t, double>> trace;  // winning start, improvements
    double epsilon = 0.0;  // cross-start spread + xtol, the empirical slack
    std::vector<StartSummary> start_summaries;
};

/// (1/n) sum_t ln( sum_i v_i(theta) g_i(y_t) ) with v = weights_for(theta).
double pseudo_loglik(const Objective& obj, const ParamVector& p);

/// Same but reports the solved weights.
double pseudo_loglik(const Objective& obj, const ParamVector& p, WeightVector& weights_out);

/// Classical averaged log-likelihood with caller-supplied weights.
double plain_loglik(const Objective& obj, const ParamVector& p, const WeightVector& w);

/// Multi-start Nelder-Mead maximization of the pseudo-likelihood over
/// (mu_i, ln sigma_i). Starts are quantile anchors, their randomized
/// perturbations, an optional EM warm start, and cfg.extra_starts; they
/// run concurrently and reduce in start-index order.
FitResult maximize(const Objective& obj, const OptimizerConfig& cfg);

/// The generated start points for a given objective/config (exposed for
/// the baselines, which share the start machinery).
std::vector<ParamVector> make_starts(std::span<const double> data, std::size_t k,
                                     const OptimizerConfig& cfg);

}  // namespace plmix
