#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "plmix/baselines.hpp"
#include "plmix/experiments.hpp"
#include "plmix/gaussian.hpp"
#include "plmix/io.hpp"
#include "plmix/likelihood.hpp"
#include "plmix/simplex.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace plmix;

namespace {

double parse_bandwidth(const std::string& text, std::span<const double> data) {
    if (text == "auto") return bandwidth_default(data);
    char* end = nullptr;
    const double h = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("--bandwidth must be 'auto' or a positive number");
    }
    return h;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::invalid_argument("cannot open output file: " + out_path);
    os << text;
}

json theta_json(const ParamVector& p) {
    json arr = json::array();
    for (const Component& c : p) arr.push_back({c.mu, c.sigma});
    return arr;
}

bool toke_bound_ok(const KernelEstimate& e, const ParamVector& p, const WeightVector& v) {
    double sigma_o = 0.0;
    for (std::size_t i : v.active_set) sigma_o = std::max(sigma_o, p[i].sigma);
    const double bound =
        2.0 * std::sqrt(M_PI) * e.sup_norm() + 2.0 * std::sqrt(2.0) / sigma_o + 1e-9;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (v[i] / p[i].sigma > bound) return false;
    }
    return true;
}

struct FitFlags {
    std::string data_path;
    std::size_t k = 1;
    std::string estimator = "plk";
    std::string bandwidth = "auto";
    std::size_t starts = 8;
    double xtol = 1e-6;
    std::size_t max_evals = 0;
    std::uint64_t seed = 1;
    bool em_warm_start = false;
    std::size_t em_restarts = 4;
    std::size_t em_max_iters = 500;
    double em_tol = 1e-9;
    double em_variance_floor = 0.0;
    std::string out;
    std::string format = "json";
};

int run_fit(const FitFlags& f) {
    const std::vector<double> data = read_sample_file(f.data_path);
    if (f.k < 1) throw std::invalid_argument("--k must be >= 1");
    const auto estimator = estimator_from_string(f.estimator);
    if (!estimator) throw std::invalid_argument("unknown estimator: " + f.estimator);
    if (data.size() < std::max<std::size_t>(2, f.k)) {
        throw std::invalid_argument("fit requires at least max(2, k) observations");
    }

    const double h = parse_bandwidth(f.bandwidth, data);
    const KernelEstimate e(data, h);

    FitResult fit;
    if (*estimator == Estimator::em) {
        EMConfig cfg;
        cfg.restarts = f.em_restarts;
        cfg.max_iters = f.em_max_iters;
        cfg.tol = f.em_tol;
        cfg.variance_floor = f.em_variance_floor;
        cfg.seed = f.seed;
        fit = em_fit(data, f.k, cfg);
    } else {
        OptimizerConfig cfg;
        cfg.starts = f.starts;
        cfg.xtol = f.xtol;
        cfg.max_evals = f.max_evals;
        cfg.seed = f.seed;
        cfg.em_warm_start = f.em_warm_start;
        fit = *estimator == Estimator::plk ? maximize(Objective(e, f.k), cfg)
                                           : l2_fit(e, f.k, cfg);
    }

    const WeightVector projected = weights_for(e, fit.theta_hat);
    const QuadraticProjection q = make_projection(e, fit.theta_hat, true);

    json report;
    report["theta_hat"] = theta_json(fit.theta_hat);
    report["weights"] = fit.weights.weights;
    report["objective"] = fit.objective_value;
    report["epsilon"] = fit.epsilon;
    report["bandwidth"] = h;
    report["n"] = data.size();
    report["diagnostics"] = {
        {"sup_norm", e.sup_norm()},
        {"toke_bound_ok", toke_bound_ok(e, fit.theta_hat, projected)},
        {"projection_distance", projection_distance(q, fit.weights.weights)},
    };

    if (f.format == "json") {
        emit(report.dump(2) + "\n", f.out);
    } else if (f.format == "csv") {
        std::string header = "objective,epsilon,bandwidth,n,sup_norm,toke_bound_ok,"
                             "projection_distance";
        char buf[64];
        std::string row;
        const auto add = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            if (!row.empty()) row += ",";
            row += buf;
        };
        add(fit.objective_value);
        add(fit.epsilon);
        add(h);
        row += "," + std::to_string(data.size());
        add(e.sup_norm());
        row += std::string(",") +
               (toke_bound_ok(e, fit.theta_hat, projected) ? "1" : "0");
        add(projection_distance(q, fit.weights.weights));
        for (std::size_t i = 0; i < fit.theta_hat.size(); ++i) {
            header += ",mu_" + std::to_string(i) + ",sigma_" + std::to_string(i) +
                      ",w_" + std::to_string(i);
            add(fit.theta_hat[i].mu);
            add(fit.theta_hat[i].sigma);
            add(fit.weights[i]);
        }
        emit(header + "\n" + row + "\n", f.out);
    } else {
        throw std::invalid_argument("--format must be json or csv");
    }
    return 0;
}

struct WeightsFlags {
    std::string data_path;
    std::string theta;
    std::string bandwidth = "auto";
    std::string out;
};

int run_weights(const WeightsFlags& f) {
    const std::vector<double> data = read_sample_file(f.data_path);
    const std::vector<Component> comps = parse_theta_list(f.theta);
    const double h = parse_bandwidth(f.bandwidth, data);
    const KernelEstimate e(data, h);

    const QuadraticProjection q = make_projection(e, comps, true);
    const WeightVector w = solve_simplex(q);

    json report;
    json theta = json::array();
    for (const Component& c : comps) theta.push_back({c.mu, c.sigma});
    report["theta"] = theta;
    report["weights"] = w.weights;
    report["active_set"] = w.active_set;
    report["kkt_residual"] = w.kkt_residual;
    report["projection_distance"] = projection_distance(q, w.weights);
    try {
        const Eigen::VectorXd dude = weights_unconstrained(q);
        report["dude"] = {
            {"weights", std::vector<double>(dude.data(), dude.data() + dude.size())},
            {"out_of_simplex", out_of_simplex(dude)},
        };
    } catch (const std::runtime_error& ex) {
        report["dude"] = {{"error", ex.what()}};
    }
    emit(report.dump(2) + "\n", f.out);
    return 0;
}

struct SimulateFlags {
    std::string truth;
    std::string scenario_path;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_simulate(const SimulateFlags& f) {
    MixtureDensity truth;
    std::string truth_desc;
    if (!f.scenario_path.empty()) {
        const Scenario s = load_scenario_file(f.scenario_path);
        truth = s.truth;
        truth_desc = "scenario " + s.name;
    } else if (!f.truth.empty()) {
        truth = parse_mixture_spec(f.truth);
        truth_desc = f.truth;
    } else {
        throw std::invalid_argument("simulate needs --truth or --scenario");
    }

    const std::vector<double> data = sample_mixture(truth, f.n, f.seed);
    const std::vector<std::string> header = {
        "plmix simulate",
        "truth = " + truth_desc,
        "n = " + std::to_string(f.n) + ", seed = " + std::to_string(f.seed),
    };
    if (f.out.empty()) {
        for (const std::string& c : header) std::cout << "# " << c << "\n";
        char buf[40];
        for (double v : data) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            std::cout << buf << "\n";
        }
    } else {
        write_sample_file(f.out, data, header);
    }
    return 0;
}

struct BenchmarkFlags {
    std::string scenario_path;
    std::string out_dir;
};

json summary_json(const Scenario& s, std::span<const ReplicateRecord> records) {
    const auto cells = summarize(records);
    json out;
    out["scenario"] = s.name;
    out["seed"] = s.seed;
    out["cells"] = json::array();
    const auto metric = [](const std::optional<MetricSummary>& m) -> json {
        if (!m) return nullptr;
        return json{{"q25", m->q25}, {"median", m->median}, {"q75", m->q75}};
    };
    for (const SummaryCell& c : cells) {
        out["cells"].push_back({
            {"estimator", std::string(to_string(c.estimator))},
            {"n", c.n},
            {"count", c.count},
            {"failed", c.failed},
            {"hausdorff", metric(c.hausdorff)},
            {"weight_err", metric(c.weight_err)},
            {"density_l2", metric(c.density_l2)},
            {"objective", metric(c.objective)},
        });
    }
    json failures = json::array();
    for (const ReplicateRecord& r : records) {
        if (r.failed) {
            failures.push_back({{"estimator", std::string(to_string(r.estimator))},
                                {"n", r.n},
                                {"replicate", r.replicate},
                                {"message", r.message}});
        }
    }
    out["failures"] = failures;
    return out;
}

int run_benchmark(const BenchmarkFlags& f) {
    const Scenario s = load_scenario_file(f.scenario_path);
    const std::vector<ReplicateRecord> records = run_scenario(s);

    fs::create_directories(f.out_dir);
    const fs::path csv_path = fs::path(f.out_dir) / "records.csv";
    const fs::path json_path = fs::path(f.out_dir) / "summary.json";

    std::ofstream csv(csv_path);
    if (!csv) throw std::invalid_argument("cannot open " + csv_path.string());
    write_records_csv(csv, records);

    std::ofstream js(json_path);
    if (!js) throw std::invalid_argument("cannot open " + json_path.string());
    js << summary_json(s, records).dump(2) << "\n";

    std::cout << csv_path.string() << "\n" << json_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum pseudo-likelihood estimation for univariate Gaussian mixtures"};
    app.require_subcommand(1);

    FitFlags fit;
    CLI::App* fit_cmd = app.add_subcommand(
        "fit", "estimate a k-component mixture from a data file");
    fit_cmd->add_option("data", fit.data_path, "sample file, one number per line")
        ->required();
    fit_cmd->add_option("--k", fit.k, "number of mixture components")->required();
    fit_cmd->add_option("--estimator", fit.estimator, "plk, em, or l2");
    fit_cmd->add_option("--bandwidth", fit.bandwidth, "auto or a positive number");
    fit_cmd->add_option("--starts", fit.starts, "optimizer starts");
    fit_cmd->add_option("--xtol", fit.xtol, "simplex diameter stop");
    fit_cmd->add_option("--max-evals", fit.max_evals, "per-start eval cap (0: 20000*k)");
    fit_cmd->add_option("--seed", fit.seed, "random seed");
    fit_cmd->add_flag("--em-warm-start", fit.em_warm_start, "add an EM start point");
    fit_cmd->add_option("--em-restarts", fit.em_restarts, "EM restarts");
    fit_cmd->add_option("--em-max-iters", fit.em_max_iters, "EM iteration cap");
    fit_cmd->add_option("--em-tol", fit.em_tol, "EM log-likelihood increment stop");
    fit_cmd->add_option("--em-variance-floor", fit.em_variance_floor,
                        "sigma floor (0: 1e-6 * sample sd)");
    fit_cmd->add_option("--out", fit.out, "output path (default stdout)");
    fit_cmd->add_option("--format", fit.format, "json or csv");
    fit_cmd->set_config("--config", "", "key = value config file");
    fit_cmd->allow_config_extras(false);
    fit_cmd->callback([&] { run_fit(fit); });

    WeightsFlags wf;
    CLI::App* weights_cmd = app.add_subcommand(
        "weights", "L2-projected simplex weights for fixed components");
    weights_cmd->add_option("data", wf.data_path, "sample file")->required();
    weights_cmd->add_option("--theta", wf.theta, "comma-separated mu:sigma pairs")
        ->required();
    weights_cmd->add_option("--bandwidth", wf.bandwidth, "auto or a positive number");
    weights_cmd->add_option("--out", wf.out, "output path (default stdout)");
    weights_cmd->set_config("--config", "", "key = value config file");
    weights_cmd->allow_config_extras(false);
    weights_cmd->callback([&] { run_weights(wf); });

    SimulateFlags sf;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "draw a sample from a mixture");
    sim_cmd->add_option("--truth", sf.truth, "w:mu:sigma triples");
    sim_cmd->add_option("--scenario", sf.scenario_path, "scenario file with a truth");
    sim_cmd->add_option("--n", sf.n, "sample size")->required();
    sim_cmd->add_option("--seed", sf.seed, "random seed");
    sim_cmd->add_option("--out", sf.out, "output path (default stdout)");
    sim_cmd->callback([&] { run_simulate(sf); });

    BenchmarkFlags bf;
    CLI::App* bench_cmd = app.add_subcommand(
        "benchmark", "run a Monte Carlo scenario, write records.csv and summary.json");
    bench_cmd->add_option("--scenario", bf.scenario_path, "scenario file")->required();
    bench_cmd->add_option("--out-dir", bf.out_dir, "output directory")->required();
    bench_cmd->callback([&] { run_benchmark(bf); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "plmix: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "plmix: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
