#pragma once

#include <Eigen/Core>
#include <vector>

namespace plmix {

/// Minimum-cost perfect assignment on a square cost matrix (shortest
/// augmenting paths with potentials, O(n^3)). Returns row -> column.
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace plmix
