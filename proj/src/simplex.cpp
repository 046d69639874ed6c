#include "plmix/simplex.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "plmix/gaussian.hpp"

namespace plmix {

namespace {

constexpr int kMaxComponents = 16;
constexpr double kKktTol = 1e-10;
constexpr double kFeasTol = 1e-12;
constexpr double kSvdCutoff = 1e-12;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

/// Scaled KKT residual of w for min w'Kw - 2c'w over the simplex:
/// active gradients equal, inactive gradients not below them, w feasible.
double kkt_residual_of(const QuadraticProjection& q, const Eigen::VectorXd& w) {
    const Eigen::VectorXd g = q.gram * w - q.cross;
    const double scale = std::max({1.0, max_abs(q.gram), q.cross.cwiseAbs().maxCoeff()});

    double gbar = 0.0;
    int active = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            gbar += g[i];
            ++active;
        }
    }
    gbar /= static_cast<double>(active);

    double res = std::abs(w.sum() - 1.0);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            res = std::max(res, std::abs(g[i] - gbar));
        } else {
            res = std::max(res, std::max(0.0, gbar - g[i]));
        }
        res = std::max(res, std::max(0.0, -w[i]));
    }
    return res / scale;
}

}  // namespace

QuadraticProjection::QuadraticProjection(Eigen::MatrixXd k, Eigen::VectorXd c,
                                         std::optional<double> norm_sq)
    : gram(std::move(k)), cross(std::move(c)), const_term(norm_sq) {
    if (gram.rows() != gram.cols() || gram.rows() != cross.size() || gram.rows() < 1) {
        throw std::invalid_argument("QuadraticProjection: dimension mismatch");
    }
    const double tol = 1e-12 * std::max(1.0, max_abs(gram));
    if (((gram - gram.transpose()).cwiseAbs().maxCoeff()) > tol) {
        throw std::invalid_argument("QuadraticProjection: gram matrix not symmetric");
    }
    if (const_term && !(*const_term >= 0.0)) {
        throw std::invalid_argument("QuadraticProjection: const_term must be non-negative");
    }
}

double QuadraticProjection::objective(const Eigen::VectorXd& w) const {
    return w.dot(gram * w) - 2.0 * cross.dot(w);
}

std::vector<SimplexCandidate> enumerate_kkt_candidates(const QuadraticProjection& q) {
    const int k = static_cast<int>(q.k());
    if (k > kMaxComponents) {
        throw std::invalid_argument("solve_simplex: k > 16 unsupported (enumeration guard)");
    }

    std::vector<SimplexCandidate> out;
    const double bscale = std::max(1.0, q.cross.cwiseAbs().maxCoeff());

    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        const int m = std::popcount(mask);
        std::vector<int> idx;
        idx.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < k; ++i) {
            if (mask & (1u << i)) idx.push_back(i);
        }

        // equality KKT on the subset: 2 K_SS w + nu 1 = 2 c_S, sum w = 1
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd b(m + 1);
        for (int r = 0; r < m; ++r) {
            for (int s = 0; s < m; ++s) a(r, s) = 2.0 * q.gram(idx[r], idx[s]);
            a(r, m) = 1.0;
            a(m, r) = 1.0;
            b[r] = 2.0 * q.cross[idx[r]];
        }
        b[m] = 1.0;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(kSvdCutoff);
        const Eigen::VectorXd z = svd.solve(b);
        if ((a * z - b).cwiseAbs().maxCoeff() > 1e-8 * bscale) continue;  // inconsistent subset

        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        bool feasible = true;
        for (int r = 0; r < m; ++r) {
            if (z[r] < -kFeasTol) {
                feasible = false;
                break;
            }
            w[idx[r]] = std::max(z[r], 0.0);
        }
        if (!feasible) continue;
        const double sum = w.sum();
        if (std::abs(sum - 1.0) > 1e-9) continue;
        w /= sum;

        out.push_back(SimplexCandidate{
            std::vector<double>(w.data(), w.data() + k),
            q.objective(w),
            kkt_residual_of(q, w),
        });
    }
    return out;
}

WeightVector solve_simplex(const QuadraticProjection& q) {
    const std::vector<SimplexCandidate> candidates = enumerate_kkt_candidates(q);
    if (candidates.empty()) {
        throw std::runtime_error("solve_simplex: no feasible KKT candidate found");
    }

    const auto norm_sq = [](const std::vector<double>& w) {
        double s = 0.0;
        for (double x : w) s += x * x;
        return s;
    };

    // Prefer certified candidates; fall back to the best feasible one.
    const SimplexCandidate* best = nullptr;
    bool best_certified = false;
    for (const SimplexCandidate& cand : candidates) {
        const bool certified = cand.kkt_residual <= kKktTol;
        if (best == nullptr) {
            best = &cand;
            best_certified = certified;
            continue;
        }
        if (certified != best_certified) {
            if (certified) {
                best = &cand;
                best_certified = true;
            }
            continue;
        }
        const double tie = 1e-11 * std::max(1.0, std::abs(best->objective));
        if (cand.objective < best->objective - tie) {
            best = &cand;
        } else if (cand.objective <= best->objective + tie &&
                   norm_sq(cand.weights) < norm_sq(best->weights)) {
            best = &cand;
        }
    }

    WeightVector result(best->weights);
    result.kkt_residual = best->kkt_residual;
    return result;
}

QuadraticProjection make_projection(const KernelEstimate& e, std::span<const Component> p,
                                    bool with_const) {
    if (p.empty()) throw std::invalid_argument("make_projection: no components");
    Eigen::VectorXd c(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
        c[static_cast<Eigen::Index>(i)] = e.component_inner(p[i]);
    }
    std::optional<double> norm_sq;
    if (with_const) norm_sq = e.l2_norm_sq();
    return QuadraticProjection(gram_matrix(p), std::move(c), norm_sq);
}

WeightVector weights_for(const KernelEstimate& e, std::span<const Component> p) {
    return solve_simplex(make_projection(e, p));
}

Eigen::VectorXd weights_unconstrained(const QuadraticProjection& q) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (!(smin > 0.0) || sv[0] / smin > 1e12) {
        throw std::runtime_error("weights_unconstrained: gram matrix condition number above 1e12");
    }
    return svd.solve(q.cross);
}

bool out_of_simplex(const Eigen::VectorXd& w, double tol) {
    if (std::abs(w.sum() - 1.0) > tol) return true;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] < -tol) return true;
    }
    return false;
}

double projection_distance(const QuadraticProjection& q, std::span<const double> w) {
    if (!q.const_term) {
        throw std::invalid_argument("projection_distance: const_term missing");
    }
    if (static_cast<Eigen::Index>(w.size()) != q.k()) {
        throw std::invalid_argument("projection_distance: weight dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    return std::sqrt(std::max(0.0, q.objective(wv) + *q.const_term));
}

}  // namespace plmix
