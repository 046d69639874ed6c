#include "plmix/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace plmix {

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& step, const NelderMeadOptions& opts) {
    const Eigen::Index dim = x0.size();
    const std::size_t n_vertices = static_cast<std::size_t>(dim) + 1;

    NelderMeadResult result;
    std::vector<Eigen::VectorXd> xs(n_vertices, x0);
    std::vector<double> fs(n_vertices);

    const auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    for (Eigen::Index i = 0; i < dim; ++i) xs[static_cast<std::size_t>(i) + 1][i] += step[i];
    for (std::size_t i = 0; i < n_vertices; ++i) fs[i] = eval(xs[i]);

    std::vector<std::size_t> ord(n_vertices);
    const auto sort_vertices = [&] {
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    sort_vertices();

    double best_seen = fs[ord[0]];
    if (opts.record_trace) result.trace.emplace_back(result.evals, best_seen);

    while (result.evals < opts.max_evals) {
        const std::size_t ibest = ord[0];
        const std::size_t iworst = ord[n_vertices - 1];
        const std::size_t isecond = ord[n_vertices - 2];

        double diameter = 0.0;
        for (std::size_t i = 1; i < n_vertices; ++i) {
            diameter = std::max(diameter, (xs[ord[i]] - xs[ibest]).cwiseAbs().maxCoeff());
        }
        if (diameter <= opts.xtol) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i + 1 < n_vertices; ++i) centroid += xs[ord[i]];
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + (centroid - xs[iworst]);
        const double f_reflected = eval(reflected);

        if (f_reflected < fs[ibest]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[iworst]);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                xs[iworst] = expanded;
                fs[iworst] = f_expanded;
            } else {
                xs[iworst] = reflected;
                fs[iworst] = f_reflected;
            }
        } else if (f_reflected < fs[isecond]) {
            xs[iworst] = reflected;
            fs[iworst] = f_reflected;
        } else {
            const bool outside = f_reflected < fs[iworst];
            Eigen::VectorXd contracted;
            if (outside) {
                contracted = centroid + 0.5 * (reflected - centroid);
            } else {
                contracted = centroid - 0.5 * (centroid - xs[iworst]);
            }
            const double f_contracted = eval(contracted);
            if (f_contracted < std::min(f_reflected, fs[iworst])) {
                xs[iworst] = contracted;
                fs[iworst] = f_contracted;
            } else {
                for (std::size_t i = 1; i < n_vertices; ++i) {
                    xs[ord[i]] = xs[ibest] + 0.5 * (xs[ord[i]] - xs[ibest]);
                    fs[ord[i]] = eval(xs[ord[i]]);
                }
            }
        }
        sort_vertices();
        if (opts.record_trace && fs[ord[0]] < best_seen) {
            best_seen = fs[ord[0]];
            result.trace.emplace_back(result.evals, best_seen);
        }
    }

    sort_vertices();
    result.x = xs[ord[0]];
    result.value = fs[ord[0]];
    return result;
}

}  // namespace plmix
