#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace plmix {

struct NelderMeadOptions {
    double xtol = 1e-6;           // simplex diameter stop
    std::size_t max_evals = 20000;
    bool record_trace = false;    // (eval index, best value) at improvements
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evals = 0;
    bool converged = false;
    std::vector<std::pair<std::size_t, double>> trace;
};

/// Downhill simplex minimization with the standard reflection/expansion/
/// contraction/shrink coefficients. Infinite objective values are handled
/// as "worst"; the best-so-far value is non-increasing by construction.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& step, const NelderMeadOptions& opts);

}  // namespace plmix
