#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "plmix/kernels.hpp"
#include "plmix/rng.hpp"

using namespace plmix;

namespace {

bool close(double a, double b, double rtol, double atol = 1e-290) {
    if (a == b) return true;
    return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

std::vector<double> random_sample(Rng& rng, std::size_t n, double scale) {
    std::vector<double> ys(n);
    for (double& y : ys) y = rng.normal(rng.uniform(-3.0, 3.0), scale);
    return ys;
}

}  // namespace

TEST_CASE("dispatch reports a usable table") {
    const auto& ops = kernels::active();
    CHECK((std::string(ops.name) == "avx2" || std::string(ops.name) == "scalar"));
    kernels::force(&kernels::scalar_ops());
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::force(nullptr);
}

TEST_CASE("sum_exp_sq matches between implementations") {
    const kernels::Ops* simd = kernels::avx2_ops();
    if (simd == nullptr) return;  // non-x86 build: scalar only
    Rng rng(12345);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 300.0));
        const auto ys = random_sample(rng, n, rng.uniform(0.1, 4.0));
        const double mu = rng.uniform(-6.0, 6.0);
        const double itv = std::exp(rng.uniform(-4.0, 12.0));
        const double offset = rng.uniform(-700.0, 0.0);
        const double a = kernels::scalar_ops().sum_exp_sq(ys, mu, itv, offset);
        const double b = simd->sum_exp_sq(ys, mu, itv, offset);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(close(a, b, 1e-12));
    }
}

TEST_CASE("sum_exp_sq handles deep underflow") {
    const kernels::Ops* simd = kernels::avx2_ops();
    std::vector<double> ys = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    const double scalar = kernels::scalar_ops().sum_exp_sq(ys, 1e6, 0.5, 0.0);
    CHECK(scalar == 0.0);
    if (simd != nullptr) CHECK(simd->sum_exp_sq(ys, 1e6, 0.5, 0.0) == 0.0);
}

TEST_CASE("min_sq_dist equals brute force") {
    const kernels::Ops* simd = kernels::avx2_ops();
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 50.0));
        const auto ys = random_sample(rng, n, 1.0);
        const double c = rng.uniform(-8.0, 8.0);
        double expected = std::numeric_limits<double>::infinity();
        for (double y : ys) expected = std::min(expected, (y - c) * (y - c));
        CHECK(kernels::scalar_ops().min_sq_dist(ys, c) == expected);
        if (simd != nullptr) CHECK(simd->min_sq_dist(ys, c) == expected);
    }
}

TEST_CASE("mixture_loglik_sum matches between implementations") {
    const kernels::Ops* simd = kernels::avx2_ops();
    if (simd == nullptr) return;
    Rng rng(777);
    for (int rep = 0; rep < 120; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 400.0));
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform(0.0, 6.0));
        const auto ys = random_sample(rng, n, rng.uniform(0.3, 3.0));
        std::vector<double> mu(k), itv(k), coef(k);
        for (std::size_t i = 0; i < k; ++i) {
            mu[i] = rng.uniform(-6.0, 6.0);
            const double sigma = std::exp(rng.uniform(-6.0, 2.0));
            itv[i] = 1.0 / (2.0 * sigma * sigma);
            coef[i] = std::log(rng.uniform(0.05, 1.0)) - std::log(sigma) - 0.9189385332046727;
        }
        const double a = kernels::scalar_ops().mixture_loglik_sum(ys, mu, itv, coef);
        const double b = simd->mixture_loglik_sum(ys, mu, itv, coef);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(close(a, b, 1e-12, 1e-12));
    }
}

TEST_CASE("mixture_loglik_sum stays finite for extreme sigmas") {
    std::vector<double> ys = {-1.0, 0.0, 0.5, 2.0, 3.5};
    // component glued to ys[2] with sigma 1e-150, plus a sane one
    std::vector<double> mu = {0.5, 1.0};
    const double tiny = 1e-150;
    std::vector<double> itv = {1.0 / (2.0 * tiny * tiny), 0.5};
    std::vector<double> coef = {std::log(0.5) - std::log(tiny) - 0.9189385332046727,
                                std::log(0.5) - 0.9189385332046727};
    const double v = kernels::scalar_ops().mixture_loglik_sum(ys, mu, itv, coef);
    CHECK(std::isfinite(v));
    if (const kernels::Ops* simd = kernels::avx2_ops()) {
        CHECK(std::isfinite(simd->mixture_loglik_sum(ys, mu, itv, coef)));
    }
}
