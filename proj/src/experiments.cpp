#include "plmix/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "plmix/gaussian.hpp"
#include "plmix/hungarian.hpp"
#include "plmix/parallel.hpp"
#include "plmix/rng.hpp"

namespace plmix {

namespace {

// Stable tags feeding the seed hash; never renumber.
std::uint64_t estimator_tag(Estimator e) {
    switch (e) {
        case Estimator::plk: return 1;
        case Estimator::em: return 2;
        case Estimator::l2: return 3;
    }
    return 0;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

MetricSummary order_stats(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size();
    const auto at = [&](double p) {
        return xs[static_cast<std::size_t>(p * static_cast<double>(m - 1))];
    };
    return MetricSummary{at(0.25), at(0.5), at(0.75)};
}

}  // namespace

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::plk: return "plk";
        case Estimator::em: return "em";
        case Estimator::l2: return "l2";
    }
    return "?";
}

std::optional<Estimator> estimator_from_string(std::string_view s) {
    if (s == "plk") return Estimator::plk;
    if (s == "em") return Estimator::em;
    if (s == "l2") return Estimator::l2;
    return std::nullopt;
}

void Scenario::validate() const {
    if (truth.size() < 1) throw std::invalid_argument("scenario: truth mixture is empty");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!(truth.weights[i] > 0.0)) {
            throw std::invalid_argument("scenario: truth weights must be strictly positive");
        }
        for (std::size_t j = i + 1; j < truth.size(); ++j) {
            if (truth.params[i].mu == truth.params[j].mu &&
                truth.params[i].sigma == truth.params[j].sigma) {
                throw std::invalid_argument(
                    "scenario: truth components must be pairwise distinct");
            }
        }
    }
    if (n_grid.empty()) throw std::invalid_argument("scenario: empty n_grid");
    for (std::size_t n : n_grid) {
        if (n < 2 || n < truth.size()) {
            throw std::invalid_argument("scenario: each n must satisfy n >= max(2, k)");
        }
    }
    if (replicates < 1) throw std::invalid_argument("scenario: replicates must be >= 1");
    if (estimators.empty()) throw std::invalid_argument("scenario: no estimators selected");
    if (fixed_bandwidth && !(*fixed_bandwidth > 0.0)) {
        throw std::invalid_argument("scenario: fixed bandwidth must be positive");
    }
}

std::vector<double> sample_mixture(const MixtureDensity& truth, std::size_t n,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    const std::size_t k = truth.size();
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t i = rng.categorical(truth.weights.weights.data(), k);
        out[t] = rng.normal(truth.params[i].mu, truth.params[i].sigma);
    }
    return out;
}

double density_l2_error(const MixtureDensity& est, const MixtureDensity& truth) {
    const Eigen::Map<const Eigen::VectorXd> a(est.weights.weights.data(),
                                              static_cast<Eigen::Index>(est.size()));
    const Eigen::Map<const Eigen::VectorXd> b(truth.weights.weights.data(),
                                              static_cast<Eigen::Index>(truth.size()));
    const Eigen::MatrixXd ka = gram_matrix(est.params);
    const Eigen::MatrixXd kb = gram_matrix(truth.params);
    const Eigen::MatrixXd kab = cross_gram(est.params, truth.params);
    const double sq = a.dot(ka * a) - 2.0 * a.dot(kab * b) + b.dot(kb * b);
    return std::sqrt(std::max(0.0, sq));
}

double weight_error(const MixtureDensity& est, const MixtureDensity& truth) {
    const std::size_t k = truth.size();
    if (est.size() != k) {
        throw std::invalid_argument("weight_error: component counts differ");
    }
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double dm = est.params[i].mu - truth.params[j].mu;
            const double ds = est.params[i].sigma - truth.params[j].sigma;
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(dm * dm + ds * ds);
        }
    }
    const std::vector<std::size_t> est_to_truth = min_cost_assignment(cost);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        worst = std::max(worst,
                         std::abs(est.weights[i] - truth.weights[est_to_truth[i]]));
    }
    return worst;
}

std::vector<ReplicateRecord> run_scenario(const Scenario& s) {
    s.validate();

    struct Task {
        Estimator estimator;
        std::size_t n;
        std::size_t replicate;
    };
    std::vector<Task> tasks;
    for (Estimator e : s.estimators) {
        for (std::size_t n : s.n_grid) {
            for (std::size_t r = 0; r < s.replicates; ++r) tasks.push_back({e, n, r});
        }
    }

    std::vector<ReplicateRecord> records(tasks.size());
    parallel_for_indexed(tasks.size(), [&](std::size_t idx) {
        const Task& task = tasks[idx];
        ReplicateRecord rec;
        rec.scenario = s.name;
        rec.estimator = task.estimator;
        rec.n = task.n;
        rec.replicate = task.replicate;

        const std::uint64_t task_seed =
            mix64(s.seed, estimator_tag(task.estimator), task.n, task.replicate);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const std::vector<double> data =
                sample_mixture(s.truth, task.n, mix64(task_seed, 1));

            FitResult fit;
            if (task.estimator == Estimator::em) {
                EMConfig cfg = s.em;
                cfg.seed = mix64(task_seed, 2);
                fit = em_fit(data, s.truth.size(), cfg);
            } else {
                const double h = s.fixed_bandwidth ? *s.fixed_bandwidth
                                                   : bandwidth_default(data);
                KernelEstimate kde(data, h);
                OptimizerConfig cfg = s.optimizer;
                cfg.seed = mix64(task_seed, 2);
                fit = task.estimator == Estimator::plk
                          ? maximize(Objective(kde, s.truth.size()), cfg)
                          : l2_fit(kde, s.truth.size(), cfg);
            }

            const MixtureDensity fitted(fit.theta_hat, fit.weights);
            rec.hausdorff_error = hausdorff(fitted.params, s.truth.params);
            rec.weight_error = weight_error(fitted, s.truth);
            rec.density_l2_error = density_l2_error(fitted, s.truth);
            rec.objective_value = fit.objective_value;
        } catch (const std::exception& ex) {
            rec.failed = true;
            rec.message = ex.what();
            rec.hausdorff_error = rec.weight_error = rec.density_l2_error =
                rec.objective_value = std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        records[idx] = std::move(rec);
    });
    return records;
}

std::vector<SummaryCell> summarize(std::span<const ReplicateRecord> records) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");

    std::vector<SummaryCell> cells;
    const auto find_cell = [&](Estimator e, std::size_t n) -> SummaryCell& {
        for (SummaryCell& c : cells) {
            if (c.estimator == e && c.n == n) return c;
        }
        cells.push_back(SummaryCell{e, n});
        return cells.back();
    };

    for (const ReplicateRecord& r : records) find_cell(r.estimator, r.n);
    for (SummaryCell& cell : cells) {
        std::vector<double> h, w, d, o;
        for (const ReplicateRecord& r : records) {
            if (r.estimator != cell.estimator || r.n != cell.n) continue;
            if (r.failed) {
                ++cell.failed;
                continue;
            }
            h.push_back(r.hausdorff_error);
            w.push_back(r.weight_error);
            d.push_back(r.density_l2_error);
            o.push_back(r.objective_value);
        }
        cell.count = h.size();
        if (cell.count > 0) {
            cell.hausdorff = order_stats(h);
            cell.weight_err = order_stats(w);
            cell.density_l2 = order_stats(d);
            cell.objective = order_stats(o);
        }
    }
    return cells;
}

void write_records_csv(std::ostream& os, std::span<const ReplicateRecord> records) {
    os << "scenario,estimator,n,replicate,hausdorff,weight_err,density_l2,objective,"
          "failed,wall_ms\n";
    for (const ReplicateRecord& r : records) {
        os << r.scenario << ',' << to_string(r.estimator) << ',' << r.n << ','
           << r.replicate << ',' << format_double(r.hausdorff_error) << ','
           << format_double(r.weight_error) << ',' << format_double(r.density_l2_error)
           << ',' << format_double(r.objective_value) << ',' << (r.failed ? 1 : 0) << ','
           << format_double(r.wall_ms) << '\n';
    }
}

}  // namespace plmix
