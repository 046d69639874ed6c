#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plmix/experiments.hpp"
#include "plmix/types.hpp"

namespace plmix {

/// Reads the plain-text sample format: one finite decimal number per line,
/// UTF-8, '#' comment lines and blank lines ignored. Throws
/// std::invalid_argument on anything else.
std::vector<double> read_sample_file(const std::filesystem::path& path);

/// Writes the sample format; header lines are emitted as '#' comments.
void write_sample_file(const std::filesystem::path& path, std::span<const double> data,
                       std::span<const std::string> header_comments);

/// "w:mu:sigma,w:mu:sigma,..." -> mixture (weights must sum to 1).
MixtureDensity parse_mixture_spec(std::string_view text);

/// "mu:sigma,mu:sigma,..." -> raw component list (order preserved).
std::vector<Component> parse_theta_list(std::string_view text);

/// Scenario file: `key = value` lines with '#' comments. Keys:
///   name, truth, n_grid, replicates, estimators, seed, bandwidth,
///   starts, xtol, max_evals, em_restarts, em_max_iters, em_tol,
///   em_variance_floor
/// truth and n_grid are required; unknown keys are rejected.
Scenario load_scenario_file(const std::filesystem::path& path);

}  // namespace plmix
