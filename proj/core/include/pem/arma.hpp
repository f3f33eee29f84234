#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pem/noise.hpp"

namespace pem {

/// Model orders (p autoregressive lags, q moving-average lags).
struct ArmaOrder {
    int p = 0;
    int q = 0;

    int dim() const { return p + q; }
};

/**
 * ARMA(p,q) coefficients for the model
 *
 *   Y_t = sum_{i=1..p} ar[i-1] * Y_{t-i} + W_t + sum_{j=1..q} ma[j-1] * W_{t-j},
 *
 * with the lag-zero noise coefficient fixed to 1 and zero pre-history
 * (Y_t = W_t = 0 for t < 0). The free parameter vector is theta = [ar; ma]
 * of dimension p + q.
 */
struct ArmaParams {
    Eigen::VectorXd ar;  // a_1..a_p
    Eigen::VectorXd ma;  // b_1..b_q

    ArmaParams() = default;
    ArmaParams(Eigen::VectorXd ar, Eigen::VectorXd ma);

    int p() const { return static_cast<int>(ar.size()); }
    int q() const { return static_cast<int>(ma.size()); }
    int dim() const { return p() + q(); }
    ArmaOrder order() const { return {p(), q()}; }

    Eigen::VectorXd theta() const;
    static ArmaParams from_theta(const Eigen::VectorXd& theta, ArmaOrder order);
};

/// Root-location certificate for the lag polynomials A(z) = 1 - sum a_i z^i
/// and B(z) = 1 + sum b_j z^j. Degenerate polynomials (all trailing
/// coefficients zero) report infinite root modulus.
struct StabilityReport {
    double ar_root_min_modulus;
    double ma_root_min_modulus;
    bool stable;      // min |root of A| > 1 + margin
    bool invertible;  // min |root of B| > 1 + margin
};

StabilityReport check_stability(const ArmaParams& params, double margin = 0.0);

/// Default stability/invertibility margin used by configuration validation.
inline constexpr double kDefaultStabilityMargin = 0.05;

/// Output/noise/prediction sequences sharing a common length T, with the
/// zero pre-history convention for indices below zero.
struct Trajectory {
    Eigen::VectorXd outputs;      // Y_0..Y_{T-1}
    Eigen::VectorXd noise;        // W when simulated; size 0 otherwise
    Eigen::VectorXd predictions;  // one-step predictions when filled; size 0 otherwise

    Eigen::Index length() const { return outputs.size(); }
};

/// Simulates T steps of the ARMA recursion driven by i.i.d. noise drawn from
/// `spec` with the given seed; returns outputs and the noise that produced
/// them.
Trajectory simulate(const ArmaParams& params, const NoiseSpec& spec, int T,
                    std::uint64_t seed);

/// Simulation with an injected noise path (test oracle entry point).
Trajectory simulate_with_noise(const ArmaParams& params, const Eigen::VectorXd& noise);

/**
 * One-step-ahead predictions: the conditional expectation of Y_t given
 * Y_0..Y_{t-1}, computed by the recursion
 *
 *   yhat_t = sum_i a_i Y_{t-i} + sum_j b_j (Y_{t-j} - yhat_{t-j})
 *
 * with zero pre-history. yhat_t depends only on strictly past outputs.
 * Requires an invertible MA polynomial when q >= 1; otherwise the recursion
 * may diverge.
 */
Eigen::VectorXd predict_sequence(const ArmaParams& params, const Eigen::VectorXd& Y);

/**
 * Analytic parameter sensitivities of the predictions: row t holds
 * d(yhat_t)/d(theta) for theta = [ar; ma]. Obtained by differentiating the
 * prediction recursion, each derivative sequence running with zero
 * pre-history.
 */
Eigen::MatrixXd predict_gradients(const ArmaParams& params, const Eigen::VectorXd& Y);

/// Second-order sensitivities: one symmetric dim x dim matrix per time step.
/// AR-AR blocks vanish identically (the predictor is linear in the AR
/// coefficients); the remaining blocks follow coupled recursions driven by
/// the first-order sensitivities.
std::vector<Eigen::MatrixXd> predict_hessians(const ArmaParams& params,
                                              const Eigen::VectorXd& Y);

/// One-step prediction residuals e_t = Y_t - yhat_t. On data simulated from
/// the same parameters, this recovers the driving noise exactly.
Eigen::VectorXd residuals(const ArmaParams& params, const Eigen::VectorXd& Y);

}  // namespace pem
