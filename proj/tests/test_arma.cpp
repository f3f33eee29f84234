#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "pem/arma.hpp"

using pem::ArmaOrder;
using pem::ArmaParams;
using pem::NoiseSpec;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const double value : values) {
        v[i++] = value;
    }
    return v;
}

// Independent oracle: the ARMA output recursion written directly.
Eigen::VectorXd hand_simulate(const ArmaParams& params, const Eigen::VectorXd& w) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(w.size());
    for (Eigen::Index t = 0; t < w.size(); ++t) {
        double v = w[t];
        for (int i = 1; i <= params.p(); ++i) {
            if (t - i >= 0) {
                v += params.ar[i - 1] * y[t - i];
            }
        }
        for (int j = 1; j <= params.q(); ++j) {
            if (t - j >= 0) {
                v += params.ma[j - 1] * w[t - j];
            }
        }
        y[t] = v;
    }
    return y;
}

// Random instance with both lag polynomials comfortably outside the unit
// circle (coefficients scaled so sum |c_i| (1+m)^deg < 0.8).
ArmaParams random_stable_invertible(int p, int q, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double margin = 0.1;
    auto draw = [&](int m) {
        Eigen::VectorXd coeffs(m);
        for (int i = 0; i < m; ++i) {
            coeffs[i] = unit(rng);
        }
        const double budget = 0.8 / std::pow(1.0 + margin, m);
        const double total = coeffs.cwiseAbs().sum();
        if (total > budget) {
            coeffs *= budget / total;
        }
        return coeffs;
    };
    const ArmaParams params(draw(p), draw(q));
    const auto report = pem::check_stability(params, margin);
    REQUIRE(report.stable);
    REQUIRE(report.invertible);
    return params;
}

double max_relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("stability roots for first-order polynomials") {
    const ArmaParams ar1(vec({0.5}), Eigen::VectorXd());
    const auto r1 = pem::check_stability(ar1);
    CHECK(r1.ar_root_min_modulus == doctest::Approx(2.0));
    CHECK(r1.stable);
    CHECK(r1.invertible);  // no MA part

    const ArmaParams unit_root(vec({1.0}), Eigen::VectorXd());
    const auto r2 = pem::check_stability(unit_root, 0.0);
    CHECK(r2.ar_root_min_modulus == doctest::Approx(1.0));
    CHECK_FALSE(r2.stable);

    const ArmaParams ma1(Eigen::VectorXd(), vec({0.5}));
    const auto r3 = pem::check_stability(ma1);
    CHECK(r3.ma_root_min_modulus == doctest::Approx(2.0));
    CHECK(r3.invertible);
}

TEST_CASE("empty model reports infinite root moduli") {
    const ArmaParams empty{Eigen::VectorXd(), Eigen::VectorXd()};
    const auto report = pem::check_stability(empty);
    CHECK(std::isinf(report.ar_root_min_modulus));
    CHECK(std::isinf(report.ma_root_min_modulus));
    CHECK(report.stable);
    CHECK(report.invertible);
}

TEST_CASE("margins tighten the stability verdict") {
    const ArmaParams params(vec({0.9}), Eigen::VectorXd());
    CHECK(pem::check_stability(params, 0.0).stable);         // root at 1.11
    CHECK_FALSE(pem::check_stability(params, 0.2).stable);
}

TEST_CASE("simulation matches the hand recursion") {
    const ArmaParams ar1(vec({0.5}), Eigen::VectorXd());
    const auto traj = pem::simulate_with_noise(ar1, vec({1.0, 0.0, 0.0}));
    CHECK(traj.outputs[0] == doctest::Approx(1.0));
    CHECK(traj.outputs[1] == doctest::Approx(0.5));
    CHECK(traj.outputs[2] == doctest::Approx(0.25));

    const ArmaParams ma1(Eigen::VectorXd(), vec({0.3}));
    const auto traj2 = pem::simulate_with_noise(ma1, vec({1.0, 1.0}));
    CHECK(traj2.outputs[0] == doctest::Approx(1.0));
    CHECK(traj2.outputs[1] == doctest::Approx(1.3));
}

TEST_CASE("zero noise yields the zero trajectory") {
    const ArmaParams params(vec({0.4, -0.2}), vec({0.3}));
    const auto traj = pem::simulate_with_noise(params, Eigen::VectorXd::Zero(16));
    CHECK(traj.outputs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("seeded simulation is deterministic and stores its noise") {
    const ArmaParams params(vec({0.5}), vec({0.3}));
    const auto a = pem::simulate(params, NoiseSpec::uniform(1.0), 64, 5);
    const auto b = pem::simulate(params, NoiseSpec::uniform(1.0), 64, 5);
    CHECK((a.outputs - b.outputs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.noise.size() == 64);
    CHECK((a.outputs - hand_simulate(params, a.noise)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random simulations agree with the hand recursion") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto params = random_stable_invertible(2, 2, rng);
        const auto traj = pem::simulate(params, NoiseSpec::uniform(1.0), 40, 100 + trial);
        CHECK((traj.outputs - hand_simulate(params, traj.noise)).cwiseAbs().maxCoeff() <=
              1e-14);
    }
}

TEST_CASE("pure AR prediction is the linear combination of past outputs") {
    const ArmaParams params(vec({0.5, -0.25}), Eigen::VectorXd());
    const Eigen::VectorXd y = vec({1.0, -2.0, 0.5, 3.0, 0.25});
    const auto yhat = pem::predict_sequence(params, y);
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        double expected = 0.0;
        if (t >= 1) {
            expected += 0.5 * y[t - 1];
        }
        if (t >= 2) {
            expected += -0.25 * y[t - 2];
        }
        CHECK(yhat[t] == expected);  // exact, not approximate
    }
}

TEST_CASE("MA(1) predictor recursion") {
    const ArmaParams params(Eigen::VectorXd(), vec({0.5}));
    const auto yhat = pem::predict_sequence(params, vec({1.0, 7.0}));
    CHECK(yhat[0] == doctest::Approx(0.0));
    CHECK(yhat[1] == doctest::Approx(0.5));
}

TEST_CASE("ARMA(1,1) predictor recursion") {
    // yhat_t = (a+b) Y_{t-1} - b yhat_{t-1}
    const ArmaParams params(vec({0.5}), vec({0.3}));
    const auto yhat = pem::predict_sequence(params, vec({1.0, 2.0, -1.0}));
    CHECK(yhat[0] == doctest::Approx(0.0));
    CHECK(yhat[1] == doctest::Approx(0.8));
    CHECK(yhat[2] == doctest::Approx(0.8 * 2.0 - 0.3 * 0.8));
}

TEST_CASE("predictions are strictly causal") {
    std::mt19937_64 rng(17);
    const auto params = random_stable_invertible(2, 1, rng);
    const auto traj = pem::simulate(params, NoiseSpec::uniform(1.0), 30, 9);
    const auto base_pred = pem::predict_sequence(params, traj.outputs);
    const auto base_grad = pem::predict_gradients(params, traj.outputs);
    const auto base_hess = pem::predict_hessians(params, traj.outputs);

    const int cut = 12;
    Eigen::VectorXd mutated = traj.outputs;
    for (Eigen::Index t = cut; t < mutated.size(); ++t) {
        mutated[t] += 5.0 + static_cast<double>(t);
    }
    const auto mut_pred = pem::predict_sequence(params, mutated);
    const auto mut_grad = pem::predict_gradients(params, mutated);
    const auto mut_hess = pem::predict_hessians(params, mutated);
    for (Eigen::Index t = 0; t <= cut; ++t) {
        CHECK(mut_pred[t] == base_pred[t]);
        CHECK((mut_grad.row(t) - base_grad.row(t)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((mut_hess[static_cast<std::size_t>(t)] -
               base_hess[static_cast<std::size_t>(t)])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}

TEST_CASE("prediction is linear in the outputs") {
    std::mt19937_64 rng(23);
    const auto params = random_stable_invertible(1, 2, rng);
    const auto y1 = pem::simulate(params, NoiseSpec::uniform(1.0), 25, 41).outputs;
    const auto y2 = pem::simulate(params, NoiseSpec::uniform(1.0), 25, 42).outputs;
    const double alpha = 1.7;
    const double beta = -0.4;
    const Eigen::VectorXd combined = pem::predict_sequence(params, alpha * y1 + beta * y2);
    const Eigen::VectorXd separate = alpha * pem::predict_sequence(params, y1) +
                                     beta * pem::predict_sequence(params, y2);
    CHECK((combined - separate).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("AR(1) gradient is the lagged output") {
    const ArmaParams params(vec({0.7}), Eigen::VectorXd());
    const Eigen::VectorXd y = vec({1.0, 2.0, -3.0, 0.5});
    const auto grad = pem::predict_gradients(params, y);
    CHECK(grad(0, 0) == 0.0);
    for (Eigen::Index t = 1; t < y.size(); ++t) {
        CHECK(grad(t, 0) == y[t - 1]);
    }
}

TEST_CASE("MA(1) gradient at b=0 is the lagged output") {
    const ArmaParams params(Eigen::VectorXd(), vec({0.0}));
    const Eigen::VectorXd y = vec({1.0, -2.0, 4.0});
    const auto grad = pem::predict_gradients(params, y);
    CHECK(grad(0, 0) == 0.0);
    CHECK(grad(1, 0) == doctest::Approx(1.0));
    CHECK(grad(2, 0) == doctest::Approx(-2.0));
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(47);
    const double step = 1e-6;
    for (int trial = 0; trial < 25; ++trial) {
        const int p = static_cast<int>(rng() % 3);
        const int q = 1 + static_cast<int>(rng() % 2);
        const auto params = random_stable_invertible(p, q, rng);
        const auto y = pem::simulate(params, NoiseSpec::uniform(1.0), 50, 900 + trial).outputs;
        const auto grad = pem::predict_gradients(params, y);
        const ArmaOrder order = params.order();
        const Eigen::VectorXd theta = params.theta();
        Eigen::MatrixXd fd(y.size(), order.dim());
        for (int k = 0; k < order.dim(); ++k) {
            Eigen::VectorXd up = theta;
            Eigen::VectorXd down = theta;
            up[k] += step;
            down[k] -= step;
            fd.col(k) = (pem::predict_sequence(ArmaParams::from_theta(up, order), y) -
                         pem::predict_sequence(ArmaParams::from_theta(down, order), y)) /
                        (2.0 * step);
        }
        CHECK(max_relative_error(grad, fd) < 1e-5);
    }
}

TEST_CASE("hessians match finite differences of the gradients") {
    std::mt19937_64 rng(59);
    const double step = 1e-5;
    for (int trial = 0; trial < 15; ++trial) {
        const auto params = random_stable_invertible(1 + static_cast<int>(rng() % 2),
                                                     1 + static_cast<int>(rng() % 2), rng);
        const auto y = pem::simulate(params, NoiseSpec::uniform(1.0), 40, 700 + trial).outputs;
        const auto hess = pem::predict_hessians(params, y);
        const ArmaOrder order = params.order();
        const Eigen::VectorXd theta = params.theta();
        for (int k = 0; k < order.dim(); ++k) {
            Eigen::VectorXd up = theta;
            Eigen::VectorXd down = theta;
            up[k] += step;
            down[k] -= step;
            const Eigen::MatrixXd fd_col =
                (pem::predict_gradients(ArmaParams::from_theta(up, order), y) -
                 pem::predict_gradients(ArmaParams::from_theta(down, order), y)) /
                (2.0 * step);
            for (Eigen::Index t = 0; t < y.size(); ++t) {
                for (int m = 0; m < order.dim(); ++m) {
                    const double got = hess[static_cast<std::size_t>(t)](m, k);
                    CHECK(got == doctest::Approx(fd_col(t, m)).epsilon(1e-4).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("pure AR hessians vanish exactly") {
    const ArmaParams params(vec({0.5, 0.2, -0.1}), Eigen::VectorXd());
    const Eigen::VectorXd y = vec({1.0, 2.0, 3.0, 4.0, 5.0});
    for (const auto& h : pem::predict_hessians(params, y)) {
        CHECK(h.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("MA(1) second derivative follows its driven recursion") {
    // B(z^-1) d2yhat/db^2 = -2 d(yhat_{t-1})/db
    const ArmaParams params(Eigen::VectorXd(), vec({0.4}));
    const Eigen::VectorXd y = vec({1.0, -1.0, 2.0, 0.5, -0.25, 1.5});
    const auto grad = pem::predict_gradients(params, y);
    const auto hess = pem::predict_hessians(params, y);
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        const double lhs = hess[static_cast<std::size_t>(t)](0, 0) +
                           (t >= 1 ? 0.4 * hess[static_cast<std::size_t>(t - 1)](0, 0) : 0.0);
        const double rhs = t >= 1 ? -2.0 * grad(t - 1, 0) : 0.0;
        CHECK(lhs == doctest::Approx(rhs));
    }
}

TEST_CASE("hessians are exactly symmetric") {
    std::mt19937_64 rng(61);
    const auto params = random_stable_invertible(2, 2, rng);
    const auto y = pem::simulate(params, NoiseSpec::uniform(1.0), 30, 8).outputs;
    for (const auto& h : pem::predict_hessians(params, y)) {
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("residuals at the truth recover the driving noise") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const auto params = random_stable_invertible(1, 1, rng);
        const auto traj = pem::simulate(params, NoiseSpec::uniform(1.0), 200, 50 + trial);
        const auto e = pem::residuals(params, traj.outputs);
        CHECK((e - traj.noise).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("residual corner cases") {
    const ArmaParams params(Eigen::VectorXd(), vec({0.5}));
    const auto e = pem::residuals(params, vec({1.0, 7.0}));
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(6.5));
    const auto zero = pem::residuals(params, Eigen::VectorXd::Zero(5));
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta round trip") {
    const ArmaParams params(vec({0.1, 0.2}), vec({0.3}));
    const auto theta = params.theta();
    const auto back = ArmaParams::from_theta(theta, {2, 1});
    CHECK((back.ar - params.ar).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.ma - params.ma).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(ArmaParams::from_theta(theta, ArmaOrder{1, 1}), std::invalid_argument);
}
