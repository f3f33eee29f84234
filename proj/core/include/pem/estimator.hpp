#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "pem/arma.hpp"
#include "pem/noise.hpp"
#include "pem/param_space.hpp"

namespace pem {

/// Knobs for the multi-start projected Levenberg-Marquardt fit.
struct FitConfig {
    int n_starts = 8;
    // Net resolution for start placement; unset means radius / 4.
    std::optional<double> start_net_epsilon;
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;  // on the projected gradient of the loss
    double levenberg_damping_init = 1e-3;
    // Test-only convenience: also start from truth_start (when provided), so
    // the returned loss is guaranteed not to exceed the loss at the truth.
    bool include_truth_start = false;
    std::optional<Eigen::VectorXd> truth_start;
};

struct FitResult {
    Eigen::VectorXd theta_hat;  // always inside the parameter class
    double loss = 0.0;
    int starts_used = 0;
    int iterations_total = 0;
    bool converged = false;
};

/// Mean squared one-step prediction error (1/T) sum_t (yhat_t - Y_t)^2.
double loss(ArmaOrder order, const Eigen::VectorXd& theta, const Eigen::VectorXd& Y);

/**
 * Minimizes the quadratic prediction-error criterion over the ball `cls`
 * with Levenberg-Marquardt from several net-based starting points (plus the
 * origin, plus the optional truth start). Every iterate is projected back
 * onto the class, steps are accepted only when the loss decreases, and
 * candidate steps leaving the invertible region are rejected like failed
 * steps. Returns the best terminal point, with ties broken by
 * lexicographically smallest parameter vector.
 *
 * Throws EstimationError if every start diverges to non-finite values.
 */
FitResult fit(ArmaOrder order, const Eigen::VectorXd& Y, const ParameterClass& cls,
              const FitConfig& config = {});

/// Exact AR(1) least-squares coefficient sum(Y_{t-1} Y_t) / sum(Y_{t-1}^2),
/// projected onto [-radius, radius]. Returns 0 when the regressor energy is
/// zero. Test oracle for `fit`.
double closed_form_ar1(const Eigen::VectorXd& Y, const ParameterClass& cls);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/**
 * Monte Carlo estimate of the mean squared prediction gap
 * (1/T) sum_t (yhat_t(theta_hat) - yhat_t(theta_star))^2 over fresh
 * trajectories simulated from theta_star. Replicates use seeds derived from
 * `seed`; requires n_mc >= 2 for the standard error.
 */
McEstimate prediction_error_mc(ArmaOrder order, const Eigen::VectorXd& theta_hat,
                               const Eigen::VectorXd& theta_star, const NoiseSpec& noise,
                               int T, int n_mc, std::uint64_t seed);

}  // namespace pem
