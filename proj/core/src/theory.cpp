#include "pem/theory.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pem/errors.hpp"
#include "pem/seeding.hpp"

namespace pem {

namespace {

double spectral_norm_symmetric(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void check_aligned(const Eigen::VectorXd& Y, const Eigen::VectorXd& W) {
    if (Y.size() == 0 || Y.size() != W.size()) {
        throw std::invalid_argument("output and noise sequences must share a length >= 1");
    }
}

// Evaluates (factor * ln(log_arg))^exponent, flooring non-positive bases at
// one. The appendix formulas implicitly assume these logarithms exceed one.
double powered_log_term(double factor, double log_arg, double exponent,
                        const char* name, BurnInReport& report) {
    if (!(factor > 0.0) || !(log_arg > 1.0)) {
        report.floored_terms.emplace_back(name);
        return 1.0;
    }
    return std::pow(factor * std::log(log_arg), exponent);
}

}  // namespace

void ConstantSet::validate() const {
    if (d_theta < 1) {
        throw std::invalid_argument("ConstantSet: d_theta must be >= 1");
    }
    const bool positives = sigma_w > 0 && B_theta > 0 && L1 > 0 && a > 0 &&
                           lambda0 > 0 && b1 > 0;
    if (!positives || L2 < 0 || L3 < 0) {
        throw std::invalid_argument("ConstantSet: constants out of range");
    }
    if (!(b2 >= 0.0 && b2 < 1.0)) {
        throw std::invalid_argument("ConstantSet: b2 must lie in [0, 1)");
    }
    if (!(gamma > 0.0 && gamma < 0.5)) {
        throw std::invalid_argument("ConstantSet: gamma must lie in (0, 1/2)");
    }
}

BurnInReport burn_in_times(const ConstantSet& cs) {
    cs.validate();
    BurnInReport report;
    const double d = static_cast<double>(cs.d_theta);
    const double inv_exp = 1.0 / (1.0 - cs.b2);
    const double L1sq = cs.L1 * cs.L1;
    const double L1p4 = L1sq * L1sq;

    const double base1 = 32.0 * d * cs.b1 * L1p4 * cs.a * cs.a;
    const double t1a =
        powered_log_term(base1, 8.0 * std::sqrt(8.0), inv_exp, "T1a", report);
    const double t1b = powered_log_term(2.0 * base1 * inv_exp, 4.0 * base1 * inv_exp,
                                        inv_exp, "T1b", report);
    report.T1 = std::max(t1a, t1b);

    report.T21 = powered_log_term(24.0 * d * cs.b1 * L1sq / cs.lambda0,
                                  6.0 * cs.L1 / std::sqrt(cs.lambda0), inv_exp, "T21",
                                  report);
    report.T22 = powered_log_term(16.0 * d * cs.b1 * L1sq / cs.lambda0,
                                  15.0 * cs.L1 / std::sqrt(cs.lambda0), inv_exp, "T22",
                                  report);
    const double t23_base = 192.0 * cs.b1 * L1sq / (cs.lambda0 * (1.0 - cs.b2));
    const double t23a =
        powered_log_term(t23_base, 2.0 * t23_base, inv_exp, "T23a", report);
    const double t23b = powered_log_term(
        48.0 * cs.b1 * L1sq / cs.lambda0,
        96.0 * (cs.sigma_w * cs.sigma_w * d + 2.0 * cs.sigma_w * cs.L1 * cs.B_theta),
        inv_exp, "T23b", report);
    report.T23 = std::max(t23a, t23b);
    report.T2 = std::max({report.T21, report.T22, report.T23});

    const double sw2 = cs.sigma_w * cs.sigma_w;
    const double B2 = cs.B_theta * cs.B_theta;
    report.C1 = 16.0 * (d * sw2 + 4.0 * sw2 + 10.0 * cs.sigma_w * cs.L1 * cs.B_theta +
                        L1sq * B2);
    const double K = 8.0 * cs.a * report.C1 + 2.0 * cs.a * L1sq * B2;
    report.C2 = K * (8.0 * cs.sigma_w * cs.L3 * std::sqrt(K) +
                     18.0 * std::sqrt(d) * cs.sigma_w * cs.L2);
    report.C3 = 4.0 * B2 *
                std::sqrt(2.0 * d * sw2 *
                          (16.0 * cs.L3 * cs.L3 * B2 + 176.0 * cs.L2 * cs.L2));
    report.C4 = cs.L2 * cs.L2 * (K * K + 16.0 * B2 * B2);
    report.C5 = 2.0 * std::max(report.C2 + report.C3, report.C4);

    const double c5_pow = std::pow(report.C5, 2.0 / 3.0);
    const double gamma_exp = 3.0 / (1.0 - 2.0 * cs.gamma);
    const double t3a = powered_log_term(c5_pow, 3.0, gamma_exp, "T3a", report);
    const double t3_factor = 6.0 * c5_pow / (1.0 - 2.0 * cs.gamma);
    const double t3b =
        powered_log_term(t3_factor, 2.0 * t3_factor, gamma_exp, "T3b", report);
    report.T3 = std::max(t3a, t3b);

    report.T0 = std::max({report.T1, report.T2, report.T3});
    return report;
}

double theorem1_bound(const ConstantSet& cs, double T, double c) {
    cs.validate();
    if (!(T >= 1.0)) {
        throw std::invalid_argument("theorem1_bound: T must be >= 1");
    }
    const double B = 2.0 * cs.L1 * cs.L1 * cs.B_theta * cs.B_theta + 16.0;
    return c * cs.d_theta * cs.sigma_w * cs.sigma_w / T + B / std::pow(T, 1.0 + cs.gamma);
}

double martingale_offset(ArmaOrder order, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& W) {
    check_aligned(Y, W);
    const auto at = ArmaParams::from_theta(theta, order);
    const auto star = ArmaParams::from_theta(theta_star, order);
    const Eigen::VectorXd g = predict_sequence(at, Y) - predict_sequence(star, Y);
    double sum = 0.0;
    for (Eigen::Index t = 0; t < Y.size(); ++t) {
        sum += 4.0 * W[t] * g[t] - g[t] * g[t];
    }
    return sum / static_cast<double>(Y.size());
}

double linearized_offset(ArmaOrder order, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& W) {
    check_aligned(Y, W);
    const auto star = ArmaParams::from_theta(theta_star, order);
    const Eigen::VectorXd u = predict_gradients(star, Y) * (theta - theta_star);
    double sum = 0.0;
    for (Eigen::Index t = 0; t < Y.size(); ++t) {
        sum += 4.0 * W[t] * u[t] - 0.5 * u[t] * u[t];
    }
    return sum / static_cast<double>(Y.size());
}

double mean_squared_gap(ArmaOrder order, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& theta_star, const Eigen::VectorXd& Y) {
    const auto at = ArmaParams::from_theta(theta, order);
    const auto star = ArmaParams::from_theta(theta_star, order);
    return (predict_sequence(at, Y) - predict_sequence(star, Y)).squaredNorm() /
           static_cast<double>(Y.size());
}

TaylorCheck taylor_decomposition_check(ArmaOrder order, const Eigen::VectorXd& theta_hat,
                                       const Eigen::VectorXd& theta_star,
                                       const Eigen::VectorXd& Y, const Eigen::VectorXd& W,
                                       double L2, double L3) {
    check_aligned(Y, W);
    const auto T = Y.size();
    const auto star = ArmaParams::from_theta(theta_star, order);
    const Eigen::VectorXd delta = theta_hat - theta_star;
    const double delta_norm = delta.norm();

    TaylorCheck check;
    check.lhs = martingale_offset(order, theta_hat, theta_star, Y, W);
    check.linearized = linearized_offset(order, theta_hat, theta_star, Y, W);

    const auto hessians = predict_hessians(star, Y);
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(order.dim(), order.dim());
    for (Eigen::Index t = 0; t < T; ++t) {
        weighted += W[t] * hessians[static_cast<std::size_t>(t)];
    }
    weighted *= 2.0 / static_cast<double>(T);
    const double lipschitz_slack =
        L3 * delta_norm * 2.0 * W.cwiseAbs().sum() / static_cast<double>(T);
    check.hessian_term = (spectral_norm_symmetric(weighted) + lipschitz_slack) *
                         delta_norm * delta_norm;
    check.quartic_term = 0.25 * L2 * L2 * std::pow(delta_norm, 4);
    check.rhs = check.linearized + check.hessian_term + check.quartic_term;
    const double tol =
        1e-12 * std::max({1.0, std::abs(check.lhs), std::abs(check.rhs)});
    check.holds = check.lhs <= check.rhs + tol;
    return check;
}

Eigen::MatrixXd empirical_info(ArmaOrder order, const Eigen::VectorXd& theta_star,
                               const Eigen::VectorXd& Y) {
    if (Y.size() == 0) {
        throw std::invalid_argument("empirical_info: empty trajectory");
    }
    const auto star = ArmaParams::from_theta(theta_star, order);
    const Eigen::MatrixXd Z = predict_gradients(star, Y);
    Eigen::MatrixXd gram = (Z.transpose() * Z) / static_cast<double>(Y.size());
    return (gram + gram.transpose()) / 2.0;
}

InfoEstimate expected_info_mc(ArmaOrder order, const Eigen::VectorXd& theta_star,
                              const NoiseSpec& noise, int T, int n_mc,
                              std::uint64_t seed) {
    if (n_mc < 1) {
        throw std::invalid_argument("expected_info_mc: n_mc must be >= 1");
    }
    const auto star = ArmaParams::from_theta(theta_star, order);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(order.dim(), order.dim());
    for (int r = 0; r < n_mc; ++r) {
        const auto traj = simulate(star, noise, T, derive_seed(seed, "info", r));
        sum += empirical_info(order, theta_star, traj.outputs);
    }
    InfoEstimate estimate;
    estimate.sigma_bar = sum / static_cast<double>(n_mc);
    estimate.lambda0 = min_eigenvalue(estimate.sigma_bar);
    return estimate;
}

Eigen::MatrixXd fisher_info(const Eigen::MatrixXd& sigma_bar, double sigma_w) {
    if (!(sigma_w > 0.0)) {
        throw std::invalid_argument("fisher_info: sigma_w must be positive");
    }
    return sigma_bar / (sigma_w * sigma_w);
}

double quad_ident_constant_mc(ArmaOrder order, const ParameterClass& cls,
                              const Eigen::VectorXd& theta_star, const NoiseSpec& noise,
                              int T, double net_epsilon, int n_mc, std::uint64_t seed) {
    if (n_mc < 2) {
        throw std::invalid_argument("quad_ident_constant_mc: n_mc must be >= 2");
    }
    const auto star = ArmaParams::from_theta(theta_star, order);
    std::vector<Eigen::VectorXd> outputs;
    outputs.reserve(static_cast<std::size_t>(n_mc));
    for (int r = 0; r < n_mc; ++r) {
        outputs.push_back(simulate(star, noise, T, derive_seed(seed, "ident", r)).outputs);
    }

    double best = 0.0;
    bool any = false;
    for (const auto& point : build_epsilon_net(cls, net_epsilon)) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& Y : outputs) {
            const double v = mean_squared_gap(order, point, theta_star, Y);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n_mc;
        const double var = std::max(0.0, (sum_sq - n_mc * mean * mean) / (n_mc - 1));
        const double std_err = std::sqrt(var / n_mc);
        if (!(mean > 0.0) || mean < 10.0 * std_err) {
            continue;  // denominator indistinguishable from zero
        }
        best = std::max(best, (point - theta_star).squaredNorm() / mean);
        any = true;
    }
    if (!any) {
        throw EstimationError(
            "quad_ident_constant_mc: every net point had a degenerate denominator");
    }
    return best;
}

SmoothnessEstimate smoothness_constants_mc(ArmaOrder order, const ParameterClass& cls,
                                           const Eigen::VectorXd& theta_star,
                                           const NoiseSpec& noise, int T,
                                           double net_epsilon, int n_mc,
                                           std::uint64_t seed) {
    if (n_mc < 1) {
        throw std::invalid_argument("smoothness_constants_mc: n_mc must be >= 1");
    }
    const auto star = ArmaParams::from_theta(theta_star, order);
    const auto net = build_epsilon_net(cls, net_epsilon);
    const auto n_points = net.size();

    SmoothnessEstimate est;
    std::vector<std::vector<Eigen::MatrixXd>> hessians(n_points);
    for (int r = 0; r < n_mc; ++r) {
        const auto traj = simulate(star, noise, T, derive_seed(seed, "smooth", r));
        for (std::size_t k = 0; k < n_points; ++k) {
            const auto params = ArmaParams::from_theta(net[k], order);
            const Eigen::MatrixXd Z = predict_gradients(params, traj.outputs);
            est.L1 = std::max(Z.rowwise().norm().maxCoeff(), est.L1);
            hessians[k] = predict_hessians(params, traj.outputs);
            for (const auto& V : hessians[k]) {
                est.L2 = std::max(spectral_norm_symmetric(V), est.L2);
            }
            est.samples += T;
        }
        for (std::size_t k = 0; k < n_points; ++k) {
            for (std::size_t l = k + 1; l < n_points; ++l) {
                const double dist = (net[k] - net[l]).norm();
                if (dist == 0.0) {
                    continue;
                }
                for (std::size_t t = 0; t < hessians[k].size(); ++t) {
                    const double diff =
                        spectral_norm_symmetric(hessians[k][t] - hessians[l][t]);
                    est.L3 = std::max(diff / dist, est.L3);
                }
            }
        }
    }
    return est;
}

IsometryRates isometry_event_rates(ArmaOrder order, const Eigen::VectorXd& theta_star,
                                   const NoiseSpec& noise, int T, int n_mc,
                                   std::uint64_t seed, const IsometryConstants& constants,
                                   const std::optional<Eigen::MatrixXd>& sigma_bar,
                                   int sigma_bar_n_mc) {
    if (n_mc < 1) {
        throw std::invalid_argument("isometry_event_rates: n_mc must be >= 1");
    }
    const Eigen::MatrixXd reference =
        sigma_bar.has_value()
            ? *sigma_bar
            : expected_info_mc(order, theta_star, noise, T, sigma_bar_n_mc,
                               derive_seed(seed, "isometry-ref", 0))
                  .sigma_bar;

    constexpr double kPsdFloor = -1e-10;
    const auto star = ArmaParams::from_theta(theta_star, order);
    int upper_violations = 0;
    int lower_violations = 0;
    for (int r = 0; r < n_mc; ++r) {
        const auto traj = simulate(star, noise, T, derive_seed(seed, "isometry", r));
        const Eigen::MatrixXd hat = empirical_info(order, theta_star, traj.outputs);
        if (min_eigenvalue(8.0 * reference - hat) < kPsdFloor) {
            ++upper_violations;
        }
        if (min_eigenvalue(hat - reference / 16.0) < kPsdFloor) {
            ++lower_violations;
        }
    }

    IsometryRates rates;
    rates.upper_violation_rate = static_cast<double>(upper_violations) / n_mc;
    rates.lower_violation_rate = static_cast<double>(lower_violations) / n_mc;
    const double growth =
        constants.lambda0 * std::pow(static_cast<double>(T), 1.0 - constants.b2) /
        (constants.b1 * constants.L1 * constants.L1);
    rates.predicted_upper = std::exp(-growth / 24.0);
    rates.predicted_lower = std::exp(-growth / 16.0);
    return rates;
}

DependencyMatrix dependency_matrix_markov(const Eigen::MatrixXd& P,
                                          const Eigen::VectorXd& initial, int T) {
    const auto n = P.rows();
    if (P.cols() != n || n < 1 || n > 64) {
        throw std::domain_error("dependency_matrix_markov: P must be square with n <= 64");
    }
    if (T < 1 || T > 512) {
        throw std::domain_error("dependency_matrix_markov: T must lie in [1, 512]");
    }
    if (initial.size() != n) {
        throw std::domain_error("dependency_matrix_markov: initial has wrong size");
    }
    constexpr double kRowTol = 1e-12;
    if (P.minCoeff() < -kRowTol || initial.minCoeff() < -kRowTol ||
        std::abs(initial.sum() - 1.0) > kRowTol) {
        throw std::domain_error("dependency_matrix_markov: inputs are not stochastic");
    }
    for (Eigen::Index z = 0; z < n; ++z) {
        if (std::abs(P.row(z).sum() - 1.0) > kRowTol) {
            throw std::domain_error("dependency_matrix_markov: P rows must sum to 1");
        }
    }

    // Marginals mu_j of the chain at each observed time, renormalized to
    // unit mass to stop roundoff drift over long horizons.
    std::vector<Eigen::VectorXd> marginal(static_cast<std::size_t>(T));
    marginal[0] = initial / initial.sum();
    for (int j = 1; j < T; ++j) {
        Eigen::VectorXd mu = P.transpose() * marginal[static_cast<std::size_t>(j - 1)];
        marginal[static_cast<std::size_t>(j)] = mu / mu.sum();
    }

    DependencyMatrix result;
    result.gamma = Eigen::MatrixXd::Zero(T, T);
    result.gamma.diagonal().setOnes();
    // Row z of diff is P^k(z,.) - mu_{i+k}; the recursion diff <- diff * P
    // reproduces it for the next lag because the marginals are themselves
    // propagated by P. Working on the difference keeps roundoff relative to
    // the (geometrically decaying) mixing gap instead of the O(1) entries,
    // which matters once the gap falls below sqrt(machine epsilon).
    // Every true row of diff sums to zero (difference of two probability
    // vectors); roundoff residuals along the all-ones direction sit on the
    // eigenvalue-1 subspace of P and would never decay, so each row is
    // projected back after every step.
    constexpr auto kill_row_sums = [](Eigen::MatrixXd& m) {
        m.colwise() -= m.rowwise().mean();
    };
    Eigen::MatrixXd diff(n, n);
    for (int i = 0; i < T - 1; ++i) {
        diff = P - Eigen::VectorXd::Ones(n) *
                       marginal[static_cast<std::size_t>(i + 1)].transpose();
        kill_row_sums(diff);
        for (int j = i + 1; j < T; ++j) {
            const double max_tv = 0.5 * diff.cwiseAbs().rowwise().sum().maxCoeff();
            result.gamma(i, j) = std::sqrt(2.0 * max_tv);
            if (j + 1 < T) {
                diff *= P;
                kill_row_sums(diff);
            }
        }
    }
    result.spectral_norm =
        std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                      result.gamma.transpose() * result.gamma, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .maxCoeff());
    return result;
}

GrowthFit fit_dependency_growth(const Eigen::MatrixXd& P, const Eigen::VectorXd& initial,
                                const std::vector<int>& T_grid) {
    if (T_grid.size() < 3 || !std::is_sorted(T_grid.begin(), T_grid.end()) ||
        std::adjacent_find(T_grid.begin(), T_grid.end()) != T_grid.end()) {
        throw std::invalid_argument(
            "fit_dependency_growth: grid must be ascending with >= 3 points");
    }
    std::vector<double> log_T;
    std::vector<double> log_norm_sq;
    std::vector<double> norm_sq;
    for (const int T : T_grid) {
        const double norm = dependency_matrix_markov(P, initial, T).spectral_norm;
        norm_sq.push_back(norm * norm);
        log_T.push_back(std::log(static_cast<double>(T)));
        log_norm_sq.push_back(std::log(norm * norm));
    }
    const auto n = static_cast<double>(log_T.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < log_T.size(); ++i) {
        mean_x += log_T[i];
        mean_y += log_norm_sq[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < log_T.size(); ++i) {
        sxx += (log_T[i] - mean_x) * (log_T[i] - mean_x);
        sxy += (log_T[i] - mean_x) * (log_norm_sq[i] - mean_y);
    }

    GrowthFit fit;
    fit.b2 = std::clamp(sxy / sxx, 0.0, std::nextafter(1.0, 0.0));
    fit.b1 = 0.0;
    for (std::size_t i = 0; i < norm_sq.size(); ++i) {
        fit.b1 = std::max(fit.b1, norm_sq[i] / std::pow(T_grid[i], fit.b2));
    }
    return fit;
}

double parameter_error_bound(double a, double M_T_hat, double L1, double B_theta,
                             double T) {
    if (!(a > 0.0) || !(T >= 1.0)) {
        throw std::invalid_argument("parameter_error_bound: need a > 0 and T >= 1");
    }
    return 8.0 * a * std::max(M_T_hat, 0.0) + 2.0 * a * L1 * L1 * B_theta * B_theta / T;
}

}  // namespace pem
