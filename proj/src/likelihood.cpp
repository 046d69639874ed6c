#include "plmix/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plmix/baselines.hpp"
#include "plmix/gaussian.hpp"
#include "plmix/kernels.hpp"
#include "plmix/nelder_mead.hpp"
#include "plmix/parallel.hpp"
#include "plmix/rng.hpp"
#include "plmix/stats.hpp"

namespace plmix {

namespace {

// Search-space guards: keep sigma^2 a normal double and mu finite so the
// batch kernels never see 0 * inf.
constexpr double kLogSigmaMin = -345.0;
constexpr double kLogSigmaMax = 345.0;
constexpr double kMuLimit = 1e15;

double batch_loglik(std::span<const double> data, const ParamVector& p,
                    const WeightVector& w) {
    std::vector<double> mu, itv, coef;
    mu.reserve(w.active_set.size());
    itv.reserve(w.active_set.size());
    coef.reserve(w.active_set.size());
    for (std::size_t i : w.active_set) {
        const Component& c = p[i];
        mu.push_back(c.mu);
        itv.push_back(1.0 / (2.0 * c.sigma * c.sigma));
        coef.push_back(std::log(w[i]) - std::log(c.sigma) - kLogSqrt2Pi);
    }
    const double total = kernels::mixture_loglik_sum(data, mu, itv, coef);
    return total / static_cast<double>(data.size());
}

ParamVector decode(const Eigen::VectorXd& x, std::size_t k) {
    std::vector<Component> comps(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double mu = std::clamp(x[static_cast<Eigen::Index>(i)], -kMuLimit, kMuLimit);
        const double ls = std::clamp(x[static_cast<Eigen::Index>(k + i)], kLogSigmaMin,
                                     kLogSigmaMax);
        comps[i] = Component{mu, std::exp(ls)};
    }
    return ParamVector(std::move(comps));
}

Eigen::VectorXd encode(const ParamVector& p) {
    const std::size_t k = p.size();
    Eigen::VectorXd x(2 * static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        x[static_cast<Eigen::Index>(i)] = p[i].mu;
        x[static_cast<Eigen::Index>(k + i)] = std::log(p[i].sigma);
    }
    return x;
}

bool theta_less(const ParamVector& a, const ParamVector& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].mu != b[i].mu) return a[i].mu < b[i].mu;
        if (a[i].sigma != b[i].sigma) return a[i].sigma < b[i].sigma;
    }
    return a.size() < b.size();
}

}  // namespace

Objective::Objective(KernelEstimate estimate, std::size_t k)
    : estimate_(std::move(estimate)), k_(k) {
    if (k_ < 1) throw std::invalid_argument("Objective requires k >= 1");
}

double pseudo_loglik(const Objective& obj, const ParamVector& p) {
    WeightVector w;
    return pseudo_loglik(obj, p, w);
}

double pseudo_loglik(const Objective& obj, const ParamVector& p, WeightVector& weights_out) {
    if (p.size() != obj.k()) {
        throw std::invalid_argument("pseudo_loglik: component count mismatch");
    }
    weights_out = weights_for(obj.estimate(), p);
    return batch_loglik(obj.data(), p, weights_out);
}

double plain_loglik(const Objective& obj, const ParamVector& p, const WeightVector& w) {
    if (p.size() != obj.k() || w.size() != p.size()) {
        throw std::invalid_argument("plain_loglik: dimension mismatch");
    }
    return batch_loglik(obj.data(), p, w);
}

std::vector<ParamVector> make_starts(std::span<const double> data, std::size_t k,
                                     const OptimizerConfig& cfg) {
    if (cfg.starts < 1) throw std::invalid_argument("OptimizerConfig.starts must be >= 1");
    const std::vector<double> sorted = sorted_copy(data);
    const double sd = population_sd(data);
    const double sigma0 = std::max(sd / static_cast<double>(k), 1e-8);

    std::vector<Component> anchor(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double p = static_cast<double>(i + 1) / static_cast<double>(k + 1);
        anchor[i] = Component{quantile_sorted(sorted, p), sigma0};
    }

    std::vector<ParamVector> starts;
    starts.reserve(cfg.starts + cfg.extra_starts.size());
    starts.emplace_back(anchor);
    for (std::size_t s = 1; s < cfg.starts; ++s) {
        Rng rng(mix64(cfg.seed, 0x5741u /* "start" stream */, s));
        std::vector<Component> perturbed(k);
        for (std::size_t i = 0; i < k; ++i) {
            perturbed[i] = Component{
                anchor[i].mu + 0.5 * sd * rng.normal(),
                sigma0 * std::exp(0.5 * rng.normal()),
            };
        }
        starts.emplace_back(std::move(perturbed));
    }
    for (const ParamVector& extra : cfg.extra_starts) {
        if (extra.size() != k) {
            throw std::invalid_argument("extra start has wrong component count");
        }
        starts.push_back(extra);
    }
    return starts;
}

FitResult maximize(const Objective& obj, const OptimizerConfig& cfg) {
    const std::size_t k = obj.k();
    const std::size_t max_evals = cfg.max_evals > 0 ? cfg.max_evals : 20000 * k;

    std::vector<ParamVector> starts = make_starts(obj.data(), k, cfg);
    if (cfg.em_warm_start) {
        EMConfig em_cfg;
        em_cfg.seed = mix64(cfg.seed, 0x454du /* "em" stream */);
        starts.push_back(em_fit(obj.data(), k, em_cfg).theta_hat);
    }

    const auto negated = [&](const Eigen::VectorXd& x) {
        return -pseudo_loglik(obj, decode(x, k));
    };

    const double sd = population_sd(obj.data());
    NelderMeadOptions nm;
    nm.xtol = cfg.xtol;
    nm.max_evals = max_evals;
    nm.record_trace = cfg.record_trace;

    std::vector<NelderMeadResult> runs(starts.size());
    std::vector<double> initial_values(starts.size());
    parallel_for_indexed(starts.size(), [&](std::size_t s) {
        Eigen::VectorXd x0 = encode(starts[s]);
        Eigen::VectorXd step(2 * static_cast<Eigen::Index>(k));
        const double mu_step = std::max(0.25 * sd, 1e-3);
        for (std::size_t i = 0; i < k; ++i) {
            step[static_cast<Eigen::Index>(i)] = mu_step;
            step[static_cast<Eigen::Index>(k + i)] = 0.5;
        }
        initial_values[s] = -negated(x0);
        runs[s] = nelder_mead_minimize(negated, x0, step, nm);
    });

    FitResult fit;
    fit.starts = starts.size();
    fit.start_summaries.reserve(starts.size());

    std::size_t best_idx = starts.size();
    ParamVector best_theta;
    double best_value = -std::numeric_limits<double>::infinity();
    double worst_final = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const double final_value = -runs[s].value;
        fit.n_evaluations += runs[s].evals + 1;
        fit.start_summaries.push_back(StartSummary{initial_values[s], final_value,
                                                   runs[s].evals});
        if (!std::isfinite(final_value)) continue;
        worst_final = std::min(worst_final, final_value);
        const ParamVector theta = decode(runs[s].x, k);
        if (final_value > best_value ||
            (final_value == best_value && theta_less(theta, best_theta))) {
            best_value = final_value;
            best_theta = theta;
            best_idx = s;
        }
    }
    if (best_idx == starts.size()) {
        throw std::runtime_error("maximize: no start reached a finite objective");
    }

    fit.theta_hat = best_theta;
    fit.objective_value = pseudo_loglik(obj, fit.theta_hat, fit.weights);
    fit.epsilon = (best_value - worst_final) + cfg.xtol;
    if (cfg.record_trace) {
        fit.trace = runs[best_idx].trace;
        for (auto& [it, v] : fit.trace) v = -v;
    }
    return fit;
}

}  // namespace plmix
