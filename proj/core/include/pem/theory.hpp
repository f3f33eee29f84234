#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pem/arma.hpp"
#include "pem/noise.hpp"
#include "pem/param_space.hpp"

namespace pem {

/**
 * The full set of problem constants entering the burn-in and bound
 * formulas: parameter dimension and radius, sub-Gaussian noise level,
 * smoothness constants L1/L2/L3, quadratic identifiability constant a,
 * excitation floor lambda0, dependency growth (b1, b2), and the
 * higher-order-rate exponent gamma.
 */
struct ConstantSet {
    int d_theta = 1;
    double sigma_w = 1.0;
    double B_theta = 1.0;
    double L1 = 1.0;
    double L2 = 0.0;  // zero for models linear in the parameter
    double L3 = 0.0;
    double a = 1.0;
    double lambda0 = 1.0;
    double b1 = 1.0;
    double b2 = 0.0;     // in [0, 1)
    double gamma = 0.25; // in (0, 1/2)

    void validate() const;  // throws std::invalid_argument on bad ranges
};

/**
 * Burn-in times and intermediate constants. T1 guards the lower-isometry
 * localization, T2 = max{T21, T22, T23} the information-matrix isometries
 * and the self-normalized bound, T3 the higher-order Taylor terms. Terms
 * whose formula produced a non-positive value (a logarithm at or below 1,
 * or a vanished constant) are floored at 1 and listed in floored_terms.
 */
struct BurnInReport {
    double T1 = 0, T21 = 0, T22 = 0, T23 = 0, T2 = 0, T3 = 0;
    double T0 = 0;  // max{T1, T2, T3}
    double C1 = 0, C2 = 0, C3 = 0, C4 = 0, C5 = 0;
    std::vector<std::string> floored_terms;
};

BurnInReport burn_in_times(const ConstantSet& constants);

/// Prediction-error envelope c*d*sigma_w^2/T + (2*L1^2*B^2 + 16)/T^(1+gamma).
double theorem1_bound(const ConstantSet& constants, double T, double c = 653.0);

/// Martingale offset (1/T) sum_t (4 W_t g_t - g_t^2) with
/// g_t = yhat_t(theta) - yhat_t(theta_star) on the given trajectory.
double martingale_offset(ArmaOrder order, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& W);

/// Linearized offset (1/T) sum_t [4 W_t Z_t'delta - (Z_t'delta)^2 / 2] with
/// Z_t the prediction gradient at theta_star and delta = theta - theta_star.
double linearized_offset(ArmaOrder order, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& W);

/// Mean squared prediction gap (1/T) sum_t g_t^2 on the given trajectory.
double mean_squared_gap(ArmaOrder order, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y);

/**
 * Checks the Taylor upper bound on the martingale offset:
 *
 *   M_T <= Mbar_T + |(2/T) sum_t W_t V_t| * |delta|^2 + (L2^2/4) |delta|^4,
 *
 * with the Hessians evaluated at theta_star and the unknown intermediate
 * points absorbed by a Lipschitz slack L3 * |delta| * (2/T) sum_t |W_t|
 * added to the operator-norm term. Reports both sides and the three
 * right-hand components.
 */
struct TaylorCheck {
    double lhs = 0;  // M_T(theta_hat)
    double rhs = 0;
    bool holds = false;
    double linearized = 0;    // Mbar_T
    double hessian_term = 0;  // (operator norm + Lipschitz slack) * |delta|^2
    double quartic_term = 0;  // (L2^2/4) * |delta|^4
};

TaylorCheck taylor_decomposition_check(ArmaOrder order, const Eigen::VectorXd& theta_hat,
                                       const Eigen::VectorXd& theta_star,
                                       const Eigen::VectorXd& Y, const Eigen::VectorXd& W,
                                       double L2, double L3);

/// Empirical information matrix (1/T) sum_t Z_t Z_t' of prediction
/// gradients at theta_star; symmetric positive semidefinite.
Eigen::MatrixXd empirical_info(ArmaOrder order, const Eigen::VectorXd& theta_star,
                               const Eigen::VectorXd& Y);

struct InfoEstimate {
    Eigen::MatrixXd sigma_bar;
    double lambda0 = 0.0;  // smallest eigenvalue of sigma_bar
};

/// Monte Carlo average of empirical_info over fresh trajectories.
InfoEstimate expected_info_mc(ArmaOrder order, const Eigen::VectorXd& theta_star,
                              const NoiseSpec& noise, int T, int n_mc,
                              std::uint64_t seed);

/// Fisher information sigma_bar / sigma_w^2.
Eigen::MatrixXd fisher_info(const Eigen::MatrixXd& sigma_bar, double sigma_w);

/**
 * Empirical lower bound for the quadratic identifiability constant: the
 * maximum over net points theta of |theta - theta_star|^2 divided by a
 * Monte Carlo estimate of the population mean squared prediction gap. Net
 * points whose estimated gap falls below ten standard errors are excluded.
 * Throws EstimationError when every net point is excluded.
 */
double quad_ident_constant_mc(ArmaOrder order, const ParameterClass& cls,
                              const Eigen::VectorXd& theta_star, const NoiseSpec& noise,
                              int T, double net_epsilon, int n_mc, std::uint64_t seed);

struct SmoothnessEstimate {
    double L1 = 0;  // max gradient norm observed
    double L2 = 0;  // max Hessian spectral norm observed
    double L3 = 0;  // max Hessian difference quotient over net pairs
    long samples = 0;
};

/// Empirical lower bounds for the smoothness constants, maximized over
/// sampled trajectories, time steps, and net points of the class.
SmoothnessEstimate smoothness_constants_mc(ArmaOrder order, const ParameterClass& cls,
                                           const Eigen::VectorXd& theta_star,
                                           const NoiseSpec& noise, int T,
                                           double net_epsilon, int n_mc,
                                           std::uint64_t seed);

struct IsometryConstants {
    double lambda0 = 1.0;
    double b1 = 1.0;
    double b2 = 0.0;
    double L1 = 1.0;
};

struct IsometryRates {
    double upper_violation_rate = 0;  // fraction with hat_Sigma not <= 8 sigma_bar
    double lower_violation_rate = 0;  // fraction with hat_Sigma not >= sigma_bar/16
    double predicted_upper = 0;       // exp(-lambda0 T^(1-b2) / (24 b1 L1^2))
    double predicted_lower = 0;       // exp(-lambda0 T^(1-b2) / (16 b1 L1^2))
};

/**
 * Empirical frequencies of the two isometry violations over n_mc fresh
 * trajectories, next to the theoretical exponential bounds evaluated at the
 * supplied constants. When sigma_bar is not given it is estimated
 * internally from sigma_bar_n_mc trajectories on a held-out seed stream.
 * Semidefiniteness is tested with a -1e-10 eigenvalue floor.
 */
IsometryRates isometry_event_rates(ArmaOrder order, const Eigen::VectorXd& theta_star,
                                   const NoiseSpec& noise, int T, int n_mc,
                                   std::uint64_t seed, const IsometryConstants& constants,
                                   const std::optional<Eigen::MatrixXd>& sigma_bar = {},
                                   int sigma_bar_n_mc = 256);

struct DependencyMatrix {
    Eigen::MatrixXd gamma;  // T x T, upper triangular, unit diagonal
    double spectral_norm = 0.0;
};

/**
 * Dependency matrix of a finite-state Markov chain observed for T steps:
 * Gamma_ij = sqrt(2 max_z TV(P^(j-i)(z,.), mu_j)) for i < j, with mu_j the
 * time-j marginal, unit diagonal, zeros below. For a Markov chain the
 * supremum over past events and future trajectories collapses to this
 * state-conditional total-variation gap at time j.
 */
DependencyMatrix dependency_matrix_markov(const Eigen::MatrixXd& P,
                                          const Eigen::VectorXd& initial, int T);

struct GrowthFit {
    double b1 = 0.0;
    double b2 = 0.0;
};

/// Fits |Gamma(T)|^2 <= b1 T^b2 on the grid: b2 is the log-log least-squares
/// slope clipped to [0, 1), and b1 the smallest prefactor making the bound
/// hold at every grid point.
GrowthFit fit_dependency_growth(const Eigen::MatrixXd& P, const Eigen::VectorXd& initial,
                                const std::vector<int>& T_grid);

/// Parameter-error envelope 8 a max(M_T, 0) + 2 a L1^2 B^2 / T. The offset
/// is clamped at zero so the returned value stays a valid upper bound.
double parameter_error_bound(double a, double M_T_hat, double L1, double B_theta,
                             double T);

}  // namespace pem
