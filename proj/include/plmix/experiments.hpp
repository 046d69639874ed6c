#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "plmix/baselines.hpp"
#include "plmix/types.hpp"

namespace plmix {

enum class Estimator { plk, em, l2 };

std::string_view to_string(Estimator e);
std::optional<Estimator> estimator_from_string(std::string_view s);

/// One Monte Carlo consistency scenario: ground truth, sample sizes,
/// replication, estimator set, and shared fit configuration.
struct Scenario {
    std::string name = "scenario";
    MixtureDensity truth;
    std::vector<std::size_t> n_grid;
    std::size_t replicates = 1;
    std::vector<Estimator> estimators;
    std::uint64_t seed = 1;
    std::optional<double> fixed_bandwidth;  // nullopt: Silverman default
    OptimizerConfig optimizer;
    EMConfig em;

    void validate() const;
};

struct ReplicateRecord {
    std::string scenario;
    Estimator estimator = Estimator::plk;
    std::size_t n = 0;
    std::size_t replicate = 0;
    double hausdorff_error = 0.0;
    double weight_error = 0.0;
    double density_l2_error = 0.0;
    double objective_value = 0.0;
    bool failed = false;
    double wall_ms = 0.0;
    std::string message;  // failure reason; not part of the CSV
};

/// i.i.d. draws from the truth: component index by CDF inversion on the
/// weights, then a Gaussian draw. Deterministic given the seed.
std::vector<double> sample_mixture(const MixtureDensity& truth, std::size_t n,
                                   std::uint64_t seed);

/// ||est - truth|| in L2, exactly from the Gram closed forms.
double density_l2_error(const MixtureDensity& est, const MixtureDensity& truth);

/// max_i |w_est[matched(i)] - w_truth[i]| under the assignment minimizing
/// total (mu, sigma) distance. Requires equal component counts.
double weight_error(const MixtureDensity& est, const MixtureDensity& truth);

/// Runs every (estimator, n, replicate) cell; per-cell seeds come from a
/// stable 64-bit mixing hash so the records are reproducible and estimator
/// streams are independent. Fit failures set the failed flag; the scenario
/// never aborts. Cells run concurrently; emission order is fixed.
std::vector<ReplicateRecord> run_scenario(const Scenario& s);

struct MetricSummary {
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct SummaryCell {
    Estimator estimator = Estimator::plk;
    std::size_t n = 0;
    std::size_t count = 0;   // non-failed records
    std::size_t failed = 0;
    // present only when count > 0
    std::optional<MetricSummary> hausdorff, weight_err, density_l2, objective;
};

/// Per-(estimator, n) exact order statistics (lower-median convention).
/// Failed records are excluded from the statistics and counted.
std::vector<SummaryCell> summarize(std::span<const ReplicateRecord> records);

/// Fixed documented header:
///   scenario,estimator,n,replicate,hausdorff,weight_err,density_l2,objective,failed,wall_ms
void write_records_csv(std::ostream& os, std::span<const ReplicateRecord> records);

}  // namespace plmix
