#include "pem/arma.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pem {

namespace {

// Smallest root modulus of 1 + c_1 z + ... + c_m z^m via companion-matrix
// eigenvalues. Trailing zero coefficients are trimmed first; a constant
// polynomial has no roots (infinite modulus).
double min_root_modulus(const Eigen::VectorXd& coeffs) {
    int m = static_cast<int>(coeffs.size());
    while (m > 0 && coeffs[m - 1] == 0.0) {
        --m;
    }
    if (m == 0) {
        return std::numeric_limits<double>::infinity();
    }
    // Monic form z^m + (c_{m-1}/c_m) z^{m-1} + ... + (1/c_m).
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) {
        companion(i, i - 1) = 1.0;
    }
    companion(0, m - 1) = -1.0 / coeffs[m - 1];
    for (int i = 1; i < m; ++i) {
        companion(i, m - 1) = -coeffs[i - 1] / coeffs[m - 1];
    }
    const Eigen::VectorXcd roots = companion.eigenvalues();
    double min_mod = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        min_mod = std::min(min_mod, std::abs(roots[i]));
    }
    return min_mod;
}

}  // namespace

ArmaParams::ArmaParams(Eigen::VectorXd ar_, Eigen::VectorXd ma_)
    : ar(std::move(ar_)), ma(std::move(ma_)) {}

Eigen::VectorXd ArmaParams::theta() const {
    Eigen::VectorXd out(dim());
    out.head(p()) = ar;
    out.tail(q()) = ma;
    return out;
}

ArmaParams ArmaParams::from_theta(const Eigen::VectorXd& theta, ArmaOrder order) {
    if (theta.size() != order.dim()) {
        throw std::invalid_argument("ArmaParams::from_theta: theta has wrong dimension");
    }
    return {theta.head(order.p), theta.tail(order.q)};
}

StabilityReport check_stability(const ArmaParams& params, double margin) {
    StabilityReport report{};
    report.ar_root_min_modulus = min_root_modulus(-params.ar);
    report.ma_root_min_modulus = min_root_modulus(params.ma);
    report.stable = report.ar_root_min_modulus > 1.0 + margin;
    report.invertible = report.ma_root_min_modulus > 1.0 + margin;
    return report;
}

Trajectory simulate(const ArmaParams& params, const NoiseSpec& spec, int T,
                    std::uint64_t seed) {
    if (T < 1) {
        throw std::invalid_argument("simulate: T must be >= 1");
    }
    return simulate_with_noise(params, sample_noise(spec, T, seed));
}

Trajectory simulate_with_noise(const ArmaParams& params, const Eigen::VectorXd& noise) {
    const auto T = noise.size();
    const int p = params.p();
    const int q = params.q();
    Trajectory traj;
    traj.noise = noise;
    traj.outputs.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        double y = noise[t];
        for (int i = 1; i <= p && i <= t; ++i) {
            y += params.ar[i - 1] * traj.outputs[t - i];
        }
        for (int j = 1; j <= q && j <= t; ++j) {
            y += params.ma[j - 1] * noise[t - j];
        }
        traj.outputs[t] = y;
    }
    return traj;
}

Eigen::VectorXd predict_sequence(const ArmaParams& params, const Eigen::VectorXd& Y) {
    const auto T = Y.size();
    const int p = params.p();
    const int q = params.q();
    Eigen::VectorXd yhat(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        double v = 0.0;
        for (int i = 1; i <= p && i <= t; ++i) {
            v += params.ar[i - 1] * Y[t - i];
        }
        for (int j = 1; j <= q && j <= t; ++j) {
            v += params.ma[j - 1] * (Y[t - j] - yhat[t - j]);
        }
        yhat[t] = v;
    }
    return yhat;
}

Eigen::MatrixXd predict_gradients(const ArmaParams& params, const Eigen::VectorXd& Y) {
    const auto T = Y.size();
    const int p = params.p();
    const int q = params.q();
    const int d = p + q;
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(T, d);
    const Eigen::VectorXd yhat = q > 0 ? predict_sequence(params, Y) : Eigen::VectorXd();

    // d(yhat_t)/d(a_i): B(z^-1) s_t = Y_{t-i}
    for (int i = 1; i <= p; ++i) {
        const int col = i - 1;
        for (Eigen::Index t = 0; t < T; ++t) {
            double v = (t - i >= 0) ? Y[t - i] : 0.0;
            for (int k = 1; k <= q && k <= t; ++k) {
                v -= params.ma[k - 1] * grad(t - k, col);
            }
            grad(t, col) = v;
        }
    }
    // d(yhat_t)/d(b_j): B(z^-1) s_t = Y_{t-j} - yhat_{t-j}
    for (int j = 1; j <= q; ++j) {
        const int col = p + j - 1;
        for (Eigen::Index t = 0; t < T; ++t) {
            double v = (t - j >= 0) ? (Y[t - j] - yhat[t - j]) : 0.0;
            for (int k = 1; k <= q && k <= t; ++k) {
                v -= params.ma[k - 1] * grad(t - k, col);
            }
            grad(t, col) = v;
        }
    }
    return grad;
}

std::vector<Eigen::MatrixXd> predict_hessians(const ArmaParams& params,
                                              const Eigen::VectorXd& Y) {
    const auto T = Y.size();
    const int p = params.p();
    const int q = params.q();
    const int d = p + q;
    std::vector<Eigen::MatrixXd> hess(static_cast<std::size_t>(T),
                                      Eigen::MatrixXd::Zero(d, d));
    if (q == 0) {
        return hess;  // the predictor is linear in the AR coefficients
    }
    const Eigen::MatrixXd grad = predict_gradients(params, Y);

    // One driven recursion per unordered parameter pair touching an MA lag:
    //   B(z^-1) h_t = -grad_{t-j},col   (mixed a_i, b_j)
    //   B(z^-1) h_t = -grad_{t-k},bj - grad_{t-j},bk
    Eigen::VectorXd h(T);
    auto run = [&](int row, int col, auto&& drive) {
        for (Eigen::Index t = 0; t < T; ++t) {
            double v = drive(t);
            for (int m = 1; m <= q && m <= t; ++m) {
                v -= params.ma[m - 1] * h[t - m];
            }
            h[t] = v;
            hess[static_cast<std::size_t>(t)](row, col) = v;
            hess[static_cast<std::size_t>(t)](col, row) = v;
        }
    };

    for (int i = 1; i <= p; ++i) {
        for (int j = 1; j <= q; ++j) {
            run(i - 1, p + j - 1, [&](Eigen::Index t) {
                return (t - j >= 0) ? -grad(t - j, i - 1) : 0.0;
            });
        }
    }
    for (int j = 1; j <= q; ++j) {
        for (int k = j; k <= q; ++k) {
            run(p + j - 1, p + k - 1, [&](Eigen::Index t) {
                double v = 0.0;
                if (t - k >= 0) {
                    v -= grad(t - k, p + j - 1);
                }
                if (t - j >= 0) {
                    v -= grad(t - j, p + k - 1);
                }
                return v;
            });
        }
    }
    return hess;
}

Eigen::VectorXd residuals(const ArmaParams& params, const Eigen::VectorXd& Y) {
    return Y - predict_sequence(params, Y);
}

}  // namespace pem
