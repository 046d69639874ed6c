#include "plmix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plmix/gaussian.hpp"
#include "plmix/nelder_mead.hpp"
#include "plmix/parallel.hpp"
#include "plmix/rng.hpp"
#include "plmix/stats.hpp"

namespace plmix {

namespace {

struct EMRun {
    std::vector<Component> comps;
    std::vector<double> weights;
    double loglik = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, double>> trace;
    std::size_t iters = 0;
};

EMRun run_em(std::span<const double> data, const ParamVector& start, double sigma_floor,
             std::size_t max_iters, double tol) {
    const std::size_t n = data.size();
    const std::size_t k = start.size();

    EMRun run;
    run.comps.assign(start.begin(), start.end());
    run.weights.assign(k, 1.0 / static_cast<double>(k));

    std::vector<double> resp(n * k);
    std::vector<double> logw(k), logpdf_term(k);

    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // E-step
        double total_ll = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            logw[i] = run.weights[i] > 0.0 ? std::log(run.weights[i])
                                           : -std::numeric_limits<double>::infinity();
        }
        for (std::size_t t = 0; t < n; ++t) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                logpdf_term[i] = logw[i] + gauss_logpdf(run.comps[i], data[t]);
                m = std::max(m, logpdf_term[i]);
            }
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double r = std::exp(logpdf_term[i] - m);
                resp[t * k + i] = r;
                s += r;
            }
            for (std::size_t i = 0; i < k; ++i) resp[t * k + i] /= s;
            total_ll += m + std::log(s);
        }
        const double ll = total_ll / static_cast<double>(n);
        run.trace.emplace_back(iter, ll);
        run.loglik = ll;
        run.iters = iter + 1;
        if (std::isfinite(prev) && ll - prev <= tol) break;
        prev = ll;

        // M-step
        for (std::size_t i = 0; i < k; ++i) {
            double r_sum = 0.0, ry_sum = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                r_sum += resp[t * k + i];
                ry_sum += resp[t * k + i] * data[t];
            }
            run.weights[i] = r_sum / static_cast<double>(n);
            if (r_sum < 1e-12) continue;  // dead component keeps its parameters
            const double mu = ry_sum / r_sum;
            double rss = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double d = data[t] - mu;
                rss += resp[t * k + i] * d * d;
            }
            run.comps[i].mu = mu;
            run.comps[i].sigma = std::max(std::sqrt(rss / r_sum), sigma_floor);
        }
    }
    return run;
}

bool theta_less(const ParamVector& a, const ParamVector& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].mu != b[i].mu) return a[i].mu < b[i].mu;
        if (a[i].sigma != b[i].sigma) return a[i].sigma < b[i].sigma;
    }
    return a.size() < b.size();
}

}  // namespace

FitResult em_fit(std::span<const double> data, std::size_t k, const EMConfig& cfg) {
    if (k < 1) throw std::invalid_argument("em_fit requires k >= 1");
    if (data.size() < k) throw std::invalid_argument("em_fit requires n >= k");
    if (cfg.max_iters < 1 || !(cfg.tol > 0.0) || cfg.restarts < 1) {
        throw std::invalid_argument("EMConfig values must be positive");
    }

    const double sd = population_sd(data);
    const double sigma_floor =
        cfg.variance_floor > 0.0 ? cfg.variance_floor : std::max(1e-6 * sd, 1e-12);

    OptimizerConfig start_cfg;
    start_cfg.starts = cfg.restarts;
    start_cfg.seed = cfg.seed;
    const std::vector<ParamVector> starts = make_starts(data, k, start_cfg);

    std::vector<EMRun> runs(starts.size());
    parallel_for_indexed(starts.size(), [&](std::size_t s) {
        runs[s] = run_em(data, starts[s], sigma_floor, cfg.max_iters, cfg.tol);
    });

    std::size_t best = runs.size();
    ParamVector best_theta;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < runs.size(); ++s) {
        if (!std::isfinite(runs[s].loglik)) continue;
        worst = std::min(worst, runs[s].loglik);
        const ParamVector theta = canonicalize(runs[s].comps);
        if (best == runs.size() || runs[s].loglik > runs[best].loglik ||
            (runs[s].loglik == runs[best].loglik && theta_less(theta, best_theta))) {
            best = s;
            best_theta = theta;
        }
    }
    if (best == runs.size()) throw std::runtime_error("em_fit: no restart converged");

    const MixtureDensity fitted = MixtureDensity::from_raw(runs[best].comps,
                                                           runs[best].weights);
    FitResult fit;
    fit.theta_hat = fitted.params;
    fit.weights = fitted.weights;
    fit.objective_value = runs[best].loglik;
    fit.starts = runs.size();
    fit.trace = runs[best].trace;
    fit.epsilon = (runs[best].loglik - worst) + cfg.tol;
    for (const EMRun& r : runs) fit.n_evaluations += r.iters;
    for (const EMRun& r : runs) {
        fit.start_summaries.push_back(StartSummary{
            r.trace.empty() ? -std::numeric_limits<double>::infinity() : r.trace.front().second,
            r.loglik, r.iters});
    }
    return fit;
}

FitResult l2_fit(const KernelEstimate& e, std::size_t k, const OptimizerConfig& cfg) {
    if (k < 1) throw std::invalid_argument("l2_fit requires k >= 1");
    const double norm_sq = e.l2_norm_sq();

    // Minimize the const-free quadratic part; distances are recovered at
    // the end via ||f_hat||^2.
    const auto quad_part = [&](const ParamVector& p) {
        const QuadraticProjection q = make_projection(e, p);
        const WeightVector w = solve_simplex(q);
        const Eigen::Map<const Eigen::VectorXd> wv(w.weights.data(),
                                                   static_cast<Eigen::Index>(w.size()));
        return q.objective(wv);
    };
    const auto to_distance = [&](double quad) {
        return std::sqrt(std::max(0.0, quad + norm_sq));
    };

    const std::size_t max_evals = cfg.max_evals > 0 ? cfg.max_evals : 20000 * k;
    const std::vector<ParamVector> starts = make_starts(e.sample(), k, cfg);
    const double sd = population_sd(e.sample());

    NelderMeadOptions nm;
    nm.xtol = cfg.xtol;
    nm.max_evals = max_evals;
    nm.record_trace = cfg.record_trace;

    std::vector<NelderMeadResult> runs(starts.size());
    std::vector<double> initial_values(starts.size());
    parallel_for_indexed(starts.size(), [&](std::size_t s) {
        const std::size_t dim = 2 * k;
        Eigen::VectorXd x0(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < k; ++i) {
            x0[static_cast<Eigen::Index>(i)] = starts[s][i].mu;
            x0[static_cast<Eigen::Index>(k + i)] = std::log(starts[s][i].sigma);
        }
        Eigen::VectorXd step(static_cast<Eigen::Index>(dim));
        const double mu_step = std::max(0.25 * sd, 1e-3);
        for (std::size_t i = 0; i < k; ++i) {
            step[static_cast<Eigen::Index>(i)] = mu_step;
            step[static_cast<Eigen::Index>(k + i)] = 0.5;
        }
        const auto f = [&](const Eigen::VectorXd& x) {
            std::vector<Component> comps(k);
            for (std::size_t i = 0; i < k; ++i) {
                comps[i] = Component{
                    std::clamp(x[static_cast<Eigen::Index>(i)], -1e15, 1e15),
                    std::exp(std::clamp(x[static_cast<Eigen::Index>(k + i)], -345.0, 345.0))};
            }
            return quad_part(ParamVector(std::move(comps)));
        };
        initial_values[s] = -to_distance(f(x0));
        runs[s] = nelder_mead_minimize(f, x0, step, nm);
    });

    FitResult fit;
    fit.starts = starts.size();
    std::size_t best = runs.size();
    ParamVector best_theta;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < runs.size(); ++s) {
        const double value = -to_distance(runs[s].value);
        fit.n_evaluations += runs[s].evals + 1;
        fit.start_summaries.push_back(StartSummary{initial_values[s], value, runs[s].evals});
        if (!std::isfinite(value)) continue;
        worst = std::min(worst, value);
        std::vector<Component> comps(k);
        for (std::size_t i = 0; i < k; ++i) {
            comps[i] = Component{
                std::clamp(runs[s].x[static_cast<Eigen::Index>(i)], -1e15, 1e15),
                std::exp(std::clamp(runs[s].x[static_cast<Eigen::Index>(k + i)], -345.0,
                                    345.0))};
        }
        const ParamVector theta(std::move(comps));
        const double best_value = best == runs.size() ? -std::numeric_limits<double>::infinity()
                                                      : -to_distance(runs[best].value);
        if (best == runs.size() || value > best_value ||
            (value == best_value && theta_less(theta, best_theta))) {
            best = s;
            best_theta = theta;
        }
    }
    if (best == runs.size()) throw std::runtime_error("l2_fit: no start reached a finite value");

    fit.theta_hat = best_theta;
    fit.weights = weights_for(e, fit.theta_hat);
    fit.objective_value = -to_distance(runs[best].value);
    fit.epsilon = (fit.objective_value - worst) + cfg.xtol;
    if (cfg.record_trace) {
        fit.trace = runs[best].trace;
        for (auto& [it, v] : fit.trace) v = -to_distance(v);
    }
    return fit;
}

}  // namespace plmix
