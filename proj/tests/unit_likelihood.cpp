#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "plmix/gaussian.hpp"
#include "plmix/likelihood.hpp"
#include "plmix/rng.hpp"
#include "plmix/stats.hpp"

using namespace plmix;

namespace {

std::vector<double> draw_mixture(Rng& rng, const MixtureDensity& truth, std::size_t n) {
    std::vector<double> ys(n);
    for (double& y : ys) {
        const std::size_t i = rng.categorical(truth.weights.weights.data(), truth.size());
        y = rng.normal(truth.params[i].mu, truth.params[i].sigma);
    }
    return ys;
}

MixtureDensity default_truth() {
    return MixtureDensity::from_raw(std::vector<Component>{{0, 1}, {4, 2}},
                                    std::vector<double>{0.3, 0.7});
}

Objective make_objective(const std::vector<double>& ys, std::size_t k) {
    return Objective(KernelEstimate(ys, bandwidth_default(ys)), k);
}

}  // namespace

TEST_CASE("all-equal components hit the closed-form value") {
    Rng rng(1111);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 10 + static_cast<std::size_t>(rng.uniform(0.0, 300.0));
        std::vector<double> ys(n);
        for (double& y : ys) y = rng.normal(rng.uniform(-3.0, 3.0), rng.uniform(0.2, 3.0));

        const double m = mean(ys);
        const double s = population_sd(ys);
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform(0.0, 4.0));
        const ParamVector degenerate(std::vector<Component>(k, Component{m, s}));

        const Objective obj = make_objective(ys, k);
        const double expected = -kLogSqrt2Pi - std::log(s) - 0.5;
        CHECK(pseudo_loglik(obj, degenerate) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("k = 1 pseudo log-likelihood is the plain Gaussian average") {
    const std::vector<double> ys = {-1.0, 1.0};
    const Objective obj(KernelEstimate(ys, 1.0), 1);
    const ParamVector p(std::vector<Component>{{0, 1}});
    CHECK(pseudo_loglik(obj, p) == doctest::Approx(-1.41893853320467274).epsilon(1e-12));
}

TEST_CASE("value at the truth approximates the entropy term") {
    const MixtureDensity truth = default_truth();
    Rng rng(20260810);
    const auto ys = draw_mixture(rng, truth, 20000);
    const Objective obj = make_objective(ys, 2);

    // Monte Carlo oracle for E ln f(Y)
    Rng mc(424242);
    const auto big = draw_mixture(mc, truth, 1000000);
    double entropy = 0.0;
    std::vector<double> w(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) w[i] = truth.weights[i];
    for (double y : big) {
        entropy += oracles::mixture_logpdf_direct(truth.params.components(), w, y);
    }
    entropy /= static_cast<double>(big.size());

    CHECK(std::abs(pseudo_loglik(obj, truth.params) - entropy) < 0.02);
}

TEST_CASE("label invariance is exact") {
    Rng rng(22);
    const auto ys = draw_mixture(rng, default_truth(), 400);
    const Objective obj = make_objective(ys, 3);

    std::vector<Component> comps = {{-0.5, 0.7}, {1.5, 1.2}, {3.5, 2.1}};
    const double base = pseudo_loglik(obj, ParamVector(comps));
    for (int rep = 0; rep < 5; ++rep) {
        std::next_permutation(comps.begin(), comps.end(), [](const Component& a,
                                                             const Component& b) {
            return a.mu < b.mu || (a.mu == b.mu && a.sigma < b.sigma);
        });
        CHECK(pseudo_loglik(obj, ParamVector(comps)) == base);
    }
}

TEST_CASE("component count mismatch throws") {
    Rng rng(3);
    const auto ys = draw_mixture(rng, default_truth(), 50);
    const Objective obj = make_objective(ys, 2);
    CHECK_THROWS_AS(pseudo_loglik(obj, ParamVector(std::vector<Component>{{0, 1}})),
                    std::invalid_argument);
}

TEST_CASE("plain_loglik agrees with pseudo_loglik at the solved weights") {
    Rng rng(17);
    const auto ys = draw_mixture(rng, default_truth(), 300);
    const Objective obj = make_objective(ys, 2);
    const ParamVector p(std::vector<Component>{{0.2, 0.9}, {3.8, 1.9}});
    WeightVector w;
    const double pseudo = pseudo_loglik(obj, p, w);
    CHECK(plain_loglik(obj, p, w) == pseudo);
}

TEST_CASE("k = 1 plain_loglik reduces to the closed form") {
    Rng rng(29);
    std::vector<double> ys(120);
    for (double& y : ys) y = rng.normal(1.0, 2.0);
    const Objective obj = make_objective(ys, 1);
    const ParamVector p(std::vector<Component>{{mean(ys), population_sd(ys)}});
    const WeightVector w(std::vector<double>{1.0});
    const double expected = -kLogSqrt2Pi - std::log(population_sd(ys)) - 0.5;
    CHECK(plain_loglik(obj, p, w) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("degenerate spike: plain likelihood diverges, pseudo stays bounded") {
    // frozen seed: ys[0] is isolated (gap 0.398), so the spike family is
    // clean over the whole sigma range
    Rng rng(274);
    const auto ys = draw_mixture(rng, default_truth(), 50);
    const Objective obj = make_objective(ys, 2);
    const double m = mean(ys);
    const double s = population_sd(ys);
    const WeightVector half(std::vector<double>{0.5, 0.5});

    double prev_plain = -std::numeric_limits<double>::infinity();
    std::vector<double> pseudo_values;
    std::vector<double> sigmas;
    for (int d = 2; d <= 8; ++d) {
        const double sigma1 = std::pow(10.0, -d);
        const std::vector<Component> raw = {{ys[0], sigma1}, {m, s}};
        const MixtureDensity md = MixtureDensity::from_raw(
            raw, std::vector<double>{0.5, 0.5});
        const double plain = plain_loglik(obj, md.params, md.weights);
        CHECK(plain > prev_plain);  // monotone growth along the spike family
        prev_plain = plain;
    }
    for (int d = 1; d <= 8; ++d) {
        const double sigma1 = std::pow(10.0, -d);
        sigmas.push_back(sigma1);
        pseudo_values.push_back(
            pseudo_loglik(obj, canonicalize(std::vector<Component>{{ys[0], sigma1},
                                                                   {m, s}})));
    }
    const auto best = std::max_element(pseudo_values.begin(), pseudo_values.end());
    CHECK(std::isfinite(*best));
    CHECK(sigmas[static_cast<std::size_t>(best - pseudo_values.begin())] >= 1e-4);
}

TEST_CASE("maximize solves k = 1 in closed form") {
    Rng rng(71);
    std::vector<double> ys(800);
    for (double& y : ys) y = rng.normal(2.5, 1.7);
    const Objective obj = make_objective(ys, 1);

    OptimizerConfig cfg;
    cfg.starts = 3;
    cfg.seed = 5;
    const FitResult fit = maximize(obj, cfg);
    CHECK(fit.theta_hat[0].mu == doctest::Approx(mean(ys)).epsilon(1e-4));
    CHECK(fit.theta_hat[0].sigma == doctest::Approx(population_sd(ys)).epsilon(1e-4));
    CHECK(fit.weights[0] == 1.0);
    CHECK(fit.epsilon >= 0.0);
}

TEST_CASE("maximize recovers a two-component truth on a fixed sample") {
    const MixtureDensity truth = default_truth();
    Rng rng(20260810);
    const auto ys = draw_mixture(rng, truth, 5000);
    const Objective obj = make_objective(ys, 2);

    OptimizerConfig cfg;
    cfg.starts = 6;
    cfg.seed = 99;
    cfg.record_trace = true;
    const FitResult fit = maximize(obj, cfg);
    CHECK(hausdorff(fit.theta_hat, truth.params) <= 0.35);

    // best-so-far objective is non-decreasing within the winning start
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
        CHECK(fit.trace[i].second >= fit.trace[i - 1].second);
    }
    // the returned maximum dominates every start's initial value
    for (const StartSummary& s : fit.start_summaries) {
        CHECK(fit.objective_value >= s.initial_value - 1e-12);
        CHECK(s.final_value >= s.initial_value - 1e-12);
    }
}

TEST_CASE("maximize survives a degenerate starting point") {
    Rng rng(13);
    const auto ys = draw_mixture(rng, default_truth(), 200);
    const Objective obj = make_objective(ys, 2);

    OptimizerConfig cfg;
    cfg.starts = 1;
    cfg.seed = 7;
    cfg.extra_starts = {canonicalize(std::vector<Component>{
        {ys[0], 1e-6}, {mean(ys), population_sd(ys)}})};
    const double start_value = pseudo_loglik(obj, cfg.extra_starts[0]);
    const FitResult fit = maximize(obj, cfg);
    CHECK(std::isfinite(fit.objective_value));
    CHECK(fit.objective_value >= start_value - 1e-12);
}
