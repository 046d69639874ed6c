#pragma once

#include <span>
#include <vector>

namespace plmix {

double mean(std::span<const double> xs);

/// Population (divide-by-n) standard deviation, matching the S_n used by
/// the all-equal-components likelihood identity.
double population_sd(std::span<const double> xs);

/// Linear-interpolation quantile (numpy/R type 7) on pre-sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Quantile of unsorted data (sorts a copy).
double quantile(std::span<const double> xs, double p);

std::vector<double> sorted_copy(std::span<const double> xs);

}  // namespace plmix
