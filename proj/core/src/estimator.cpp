#include "pem/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pem/errors.hpp"
#include "pem/seeding.hpp"

namespace pem {

namespace {

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            return a[i] < b[i];
        }
    }
    return false;
}

bool in_invertible_region(const Eigen::VectorXd& theta, ArmaOrder order) {
    if (order.q == 0) {
        return true;
    }
    const auto params = ArmaParams::from_theta(theta, order);
    return check_stability(params).ma_root_min_modulus > 1.0;
}

struct LocalRun {
    Eigen::VectorXd theta;
    double loss = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    bool finite = false;
};

// Single Levenberg-Marquardt descent from one starting point. The accepted
// loss sequence is non-increasing by construction.
LocalRun run_single_start(ArmaOrder order, const Eigen::VectorXd& Y,
                          const ParameterClass& cls, const FitConfig& config,
                          const Eigen::VectorXd& start) {
    const auto T = static_cast<double>(Y.size());
    LocalRun run;
    run.theta = project(start, cls);
    run.loss = loss(order, run.theta, Y);
    if (!std::isfinite(run.loss)) {
        return run;
    }
    run.finite = true;

    double damping = config.levenberg_damping_init;
    const double max_damping = 1e14;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const auto params = ArmaParams::from_theta(run.theta, order);
        const Eigen::VectorXd r = predict_sequence(params, Y) - Y;
        const Eigen::MatrixXd J = predict_gradients(params, Y);
        const Eigen::VectorXd g = (2.0 / T) * (J.transpose() * r);
        if (!g.allFinite()) {
            run.finite = false;
            return run;
        }
        // Projected-gradient stationarity check (equals |g| in the interior).
        const double pg_norm = (run.theta - project(run.theta - g, cls)).norm();
        if (pg_norm <= config.gradient_tolerance) {
            run.converged = true;
            break;
        }

        const Eigen::MatrixXd JtJ = J.transpose() * J;
        bool stepped = false;
        while (damping < max_damping) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += damping;
            const Eigen::VectorXd delta = A.ldlt().solve(-J.transpose() * r);
            const Eigen::VectorXd candidate = project(run.theta + delta, cls);
            ++run.iterations;
            if (candidate.allFinite() && in_invertible_region(candidate, order)) {
                const double candidate_loss = loss(order, candidate, Y);
                if (std::isfinite(candidate_loss) && candidate_loss < run.loss) {
                    run.theta = candidate;
                    run.loss = candidate_loss;
                    damping = std::max(damping / 3.0, 1e-12);
                    stepped = true;
                    break;
                }
            }
            damping *= 10.0;
        }
        if (!stepped) {
            break;  // no acceptable step at any damping; stationary for our purposes
        }
    }
    return run;
}

}  // namespace

double loss(ArmaOrder order, const Eigen::VectorXd& theta, const Eigen::VectorXd& Y) {
    if (Y.size() == 0) {
        throw std::invalid_argument("loss: empty trajectory");
    }
    const auto params = ArmaParams::from_theta(theta, order);
    return residuals(params, Y).squaredNorm() / static_cast<double>(Y.size());
}

FitResult fit(ArmaOrder order, const Eigen::VectorXd& Y, const ParameterClass& cls,
              const FitConfig& config) {
    if (cls.dimension != order.dim()) {
        throw std::invalid_argument("fit: class dimension does not match model order");
    }
    if (Y.size() < order.dim() + 1) {
        throw std::invalid_argument("fit: trajectory shorter than dim + 1");
    }
    if (config.n_starts < 1 || config.max_iterations < 1 ||
        !(config.gradient_tolerance > 0.0) || !(config.levenberg_damping_init > 0.0) ||
        (config.start_net_epsilon && !(*config.start_net_epsilon > 0.0))) {
        throw std::invalid_argument("fit: configuration values must be positive");
    }

    const double net_eps = config.start_net_epsilon.value_or(cls.radius / 4.0);
    const auto net = build_epsilon_net(cls, net_eps);

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Zero(cls.dimension));
    if (net.size() <= static_cast<std::size_t>(config.n_starts)) {
        starts.insert(starts.end(), net.begin(), net.end());
    } else {
        for (int s = 0; s < config.n_starts; ++s) {
            const auto idx = (static_cast<std::size_t>(s) * net.size()) /
                             static_cast<std::size_t>(config.n_starts);
            starts.push_back(net[idx]);
        }
    }
    if (config.include_truth_start && config.truth_start.has_value()) {
        starts.push_back(project(*config.truth_start, cls));
    }

    FitResult best;
    bool have_best = false;
    for (const auto& start : starts) {
        const LocalRun run = run_single_start(order, Y, cls, config, start);
        if (!run.finite) {
            continue;
        }
        ++best.starts_used;
        best.iterations_total += run.iterations;
        const bool better =
            !have_best || run.loss < best.loss ||
            (run.loss == best.loss && lexicographically_less(run.theta, best.theta_hat));
        if (better) {
            best.theta_hat = run.theta;
            best.loss = run.loss;
            best.converged = run.converged;
            have_best = true;
        }
    }
    if (!have_best) {
        throw EstimationError("fit: all " + std::to_string(starts.size()) +
                              " starts diverged to non-finite values");
    }
    return best;
}

double closed_form_ar1(const Eigen::VectorXd& Y, const ParameterClass& cls) {
    if (cls.dimension != 1) {
        throw std::invalid_argument("closed_form_ar1: class must be one-dimensional");
    }
    if (Y.size() < 2) {
        throw std::invalid_argument("closed_form_ar1: need at least two observations");
    }
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index t = 1; t < Y.size(); ++t) {
        num += Y[t - 1] * Y[t];
        den += Y[t - 1] * Y[t - 1];
    }
    if (den == 0.0) {
        return 0.0;
    }
    return std::clamp(num / den, -cls.radius, cls.radius);
}

McEstimate prediction_error_mc(ArmaOrder order, const Eigen::VectorXd& theta_hat,
                               const Eigen::VectorXd& theta_star, const NoiseSpec& noise,
                               int T, int n_mc, std::uint64_t seed) {
    if (n_mc < 2) {
        throw std::invalid_argument("prediction_error_mc: n_mc must be >= 2");
    }
    const auto hat = ArmaParams::from_theta(theta_hat, order);
    const auto star = ArmaParams::from_theta(theta_star, order);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < n_mc; ++r) {
        const auto traj = simulate(star, noise, T, derive_seed(seed, "pred-error", r));
        const double gap = (predict_sequence(hat, traj.outputs) -
                            predict_sequence(star, traj.outputs))
                               .squaredNorm() /
                           static_cast<double>(T);
        sum += gap;
        sum_sq += gap * gap;
    }
    const double mean = sum / n_mc;
    const double var = std::max(0.0, (sum_sq - n_mc * mean * mean) / (n_mc - 1));
    return {mean, std::sqrt(var / n_mc)};
}

}  // namespace pem
