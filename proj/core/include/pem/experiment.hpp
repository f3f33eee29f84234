#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pem/arma.hpp"
#include "pem/config.hpp"
#include "pem/estimator.hpp"
#include "pem/noise.hpp"
#include "pem/theory.hpp"

namespace pem {

/**
 * Full description of a rate-verification experiment: the true model, the
 * noise law, the parameter class, the sample-size grid, the Monte Carlo
 * budget, seeding, and the constants used for the theoretical bound column.
 */
struct ExperimentConfig {
    ArmaParams theta_star;
    NoiseSpec noise;
    double B_theta = 1.0;
    std::vector<int> T_grid;
    int n_mc = 100;
    int n_eval = 1;  // held-out evaluation trajectories per replicate
    std::uint64_t master_seed = 0;
    double gamma = 0.25;
    FitConfig fit;
    double bound_c = 653.0;
    double bound_L1 = 1.0;  // user-supplied smoothness constant for the bound column
    std::string output_path;
    int threads = 1;
    // Diagnostic mode: skip fitting and score the truth against itself.
    bool force_truth = false;

    void validate() const;  // throws ConfigError

    /// Reads every experiment key from a flat key-value config.
    static ExperimentConfig from_config(const KeyValueConfig& kv);
};

struct RateRow {
    int T = 0;
    double mean_pred_error = 0;
    double std_error = 0;
    double mean_param_error_sq = 0;
    double theorem1_bound_value = 0;
    int n_mc = 0;
};

using RateTable = std::vector<RateRow>;

/// CSV header used for rate tables.
const std::vector<std::string>& rate_table_header();

/// Converts a table to CSV cell rows (full 17-digit precision).
std::vector<std::vector<double>> rate_table_rows(const RateTable& table);

/**
 * For every grid size T and replicate r: simulates a training trajectory on
 * the "sim" seed stream, fits the model, and scores the mean squared
 * prediction gap on held-out trajectories from the disjoint "eval" stream.
 * Aggregates per-T means and standard errors, fills the bound column from
 * theorem1_bound, writes the CSV when output_path is set, and returns the
 * table. Replicates fan out across `threads` workers; results are
 * deterministic for a fixed config regardless of the thread count.
 *
 * Throws EstimationError if more than 5% of replicates fail at any T.
 */
RateTable run_rate_experiment(const ExperimentConfig& config);

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

/// Ordinary least squares of log(mean_pred_error) against log(T). Rows with
/// non-positive means are dropped; fewer than 3 usable rows is an error.
SlopeFit fit_rate_slope(const RateTable& table);

}  // namespace pem
