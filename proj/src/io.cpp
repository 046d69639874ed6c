#include "plmix/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plmix {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw std::invalid_argument(std::string("empty number for ") + std::string(what));
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("not a finite number: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::invalid_argument("not an unsigned integer for " + std::string(what) +
                                    ": '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(trim(text.substr(pos)));
            break;
        }
        out.push_back(trim(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

}  // namespace

std::vector<double> read_sample_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open data file: " + path.string());
    }
    std::vector<double> data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        try {
            data.push_back(parse_double(body, "sample value"));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": not a finite number: '" + body + "'");
        }
    }
    return data;
}

void write_sample_file(const std::filesystem::path& path, std::span<const double> data,
                       std::span<const std::string> header_comments) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot open output file: " + path.string());
    }
    for (const std::string& c : header_comments) out << "# " << c << '\n';
    char buf[40];
    for (double v : data) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

MixtureDensity parse_mixture_spec(std::string_view text) {
    std::vector<Component> comps;
    std::vector<double> weights;
    for (const std::string& part : split(text, ',')) {
        const std::vector<std::string> f = split(part, ':');
        if (f.size() != 3) {
            throw std::invalid_argument("mixture spec needs w:mu:sigma triples, got '" +
                                        part + "'");
        }
        weights.push_back(parse_double(f[0], "weight"));
        comps.push_back(Component{parse_double(f[1], "mu"), parse_double(f[2], "sigma")});
        validate(comps.back());
    }
    return MixtureDensity::from_raw(comps, weights);
}

std::vector<Component> parse_theta_list(std::string_view text) {
    std::vector<Component> comps;
    for (const std::string& part : split(text, ',')) {
        const std::vector<std::string> f = split(part, ':');
        if (f.size() != 2) {
            throw std::invalid_argument("theta list needs mu:sigma pairs, got '" + part +
                                        "'");
        }
        comps.push_back(Component{parse_double(f[0], "mu"), parse_double(f[1], "sigma")});
        validate(comps.back());
    }
    if (comps.empty()) throw std::invalid_argument("theta list is empty");
    return comps;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open scenario file: " + path.string());
    }

    Scenario s;
    s.name = path.stem().string();
    s.estimators = {Estimator::plk, Estimator::em, Estimator::l2};
    bool have_truth = false, have_grid = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected `key = value`");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));

        if (key == "name") {
            s.name = value;
        } else if (key == "truth") {
            s.truth = parse_mixture_spec(value);
            have_truth = true;
        } else if (key == "n_grid") {
            s.n_grid.clear();
            for (const std::string& v : split(value, ','))
                s.n_grid.push_back(parse_u64(v, "n_grid"));
            have_grid = true;
        } else if (key == "replicates") {
            s.replicates = parse_u64(value, key);
        } else if (key == "estimators") {
            s.estimators.clear();
            for (const std::string& v : split(value, ',')) {
                const auto e = estimator_from_string(v);
                if (!e) {
                    throw std::invalid_argument("unknown estimator '" + v + "'");
                }
                s.estimators.push_back(*e);
            }
        } else if (key == "seed") {
            s.seed = parse_u64(value, key);
        } else if (key == "bandwidth") {
            if (value == "auto") {
                s.fixed_bandwidth.reset();
            } else {
                s.fixed_bandwidth = parse_double(value, key);
            }
        } else if (key == "starts") {
            s.optimizer.starts = parse_u64(value, key);
        } else if (key == "xtol") {
            s.optimizer.xtol = parse_double(value, key);
        } else if (key == "max_evals") {
            s.optimizer.max_evals = parse_u64(value, key);
        } else if (key == "em_restarts") {
            s.em.restarts = parse_u64(value, key);
        } else if (key == "em_max_iters") {
            s.em.max_iters = parse_u64(value, key);
        } else if (key == "em_tol") {
            s.em.tol = parse_double(value, key);
        } else if (key == "em_variance_floor") {
            s.em.variance_floor = parse_double(value, key);
        } else {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
    if (!have_truth || !have_grid) {
        throw std::invalid_argument(path.string() + ": scenario requires truth and n_grid");
    }
    s.validate();
    return s;
}

}  // namespace plmix
