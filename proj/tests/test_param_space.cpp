#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "pem/errors.hpp"
#include "pem/param_space.hpp"

using pem::ParameterClass;

namespace {

// Uniform sample from the ball via direction * radius * U^(1/d).
Eigen::VectorXd sample_in_ball(const ParameterClass& cls, std::mt19937_64& rng) {
    Eigen::VectorXd direction(cls.dimension);
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm = 0.0;
    do {
        for (int i = 0; i < cls.dimension; ++i) {
            direction[i] = normal(rng);
        }
        norm = direction.norm();
    } while (norm == 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius =
        cls.radius * std::pow(unit(rng), 1.0 / static_cast<double>(cls.dimension));
    return direction * (radius / norm);
}

double nearest_net_distance(const std::vector<Eigen::VectorXd>& net,
                            const Eigen::VectorXd& point) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& candidate : net) {
        best = std::min(best, (point - candidate).norm());
    }
    return best;
}

// Covering oracle: 10^4 uniform samples, nearest-net distance <= eps.
void check_covering(const ParameterClass& cls, double epsilon, std::uint64_t seed) {
    const auto net = pem::build_epsilon_net(cls, epsilon);
    for (const auto& point : net) {
        CHECK(cls.contains(point, 1e-12));
    }
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        worst = std::max(worst, nearest_net_distance(net, sample_in_ball(cls, rng)));
    }
    CHECK(worst <= epsilon * (1.0 + 1e-9));
}

}  // namespace

TEST_CASE("projection leaves interior points alone") {
    const ParameterClass cls(1, 1.0);
    Eigen::VectorXd theta(1);
    theta << 0.3;
    CHECK(pem::project(theta, cls)[0] == doctest::Approx(0.3));
}

TEST_CASE("projection scales radially") {
    const ParameterClass cls(2, 2.5);
    Eigen::VectorXd theta(2);
    theta << 3.0, 4.0;  // norm 5
    const auto projected = pem::project(theta, cls);
    CHECK(projected[0] == doctest::Approx(1.5));
    CHECK(projected[1] == doctest::Approx(2.0));
}

TEST_CASE("projection fixes the origin") {
    const ParameterClass cls(2, 0.5);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(pem::project(zero, cls).norm() == 0.0);
}

TEST_CASE("projection rejects dimension mismatches") {
    const ParameterClass cls(2, 1.0);
    CHECK_THROWS_AS(pem::project(Eigen::VectorXd::Zero(3), cls), std::invalid_argument);
}

TEST_CASE("projection is idempotent and 1-Lipschitz") {
    const ParameterClass cls(3, 0.8);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd x(3);
        Eigen::VectorXd y(3);
        for (int i = 0; i < 3; ++i) {
            x[i] = normal(rng);
            y[i] = normal(rng);
        }
        const auto px = pem::project(x, cls);
        const auto py = pem::project(y, cls);
        CHECK((pem::project(px, cls) - px).norm() == doctest::Approx(0.0));
        CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
    }
}

TEST_CASE("covering number bound matches the closed form") {
    const ParameterClass one(1, 2.0);
    CHECK(pem::covering_number_bound(2.0, one) == doctest::Approx(3.0));
    const ParameterClass two(2, 1.0);
    CHECK(pem::covering_number_bound(0.5, two) == doctest::Approx(36.0));
}

TEST_CASE("covering number bound errors outside (0, radius]") {
    const ParameterClass cls(1, 1.0);
    CHECK_THROWS_AS(pem::covering_number_bound(1.1, cls), std::domain_error);
    CHECK_THROWS_AS(pem::covering_number_bound(0.0, cls), std::domain_error);
    CHECK_THROWS_AS(pem::covering_number_bound(-0.5, cls), std::domain_error);
}

TEST_CASE("covering number bound is monotone in epsilon and dimension") {
    const ParameterClass cls(3, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (const double eps : {0.1, 0.2, 0.5, 1.0}) {
        const double value = pem::covering_number_bound(eps, cls);
        CHECK(value < previous);
        previous = value;
    }
    double previous_dim = 0.0;
    for (int d = 1; d <= 5; ++d) {
        const double value = pem::covering_number_bound(0.5, ParameterClass(d, 1.0));
        CHECK(value > previous_dim);
        previous_dim = value;
    }
}

TEST_CASE("one-dimensional net covers at the requested radius") {
    check_covering(ParameterClass(1, 1.0), 0.5, 11);
}

TEST_CASE("coarse net collapses to the origin") {
    const auto net = pem::build_epsilon_net(ParameterClass(1, 1.0), 2.0);
    REQUIRE(net.size() == 1);
    CHECK(net[0].norm() == 0.0);
    check_covering(ParameterClass(1, 1.0), 2.0, 12);
}

TEST_CASE("fine two-dimensional net is finite and covering") {
    const ParameterClass cls(2, 1.0);
    const auto net = pem::build_epsilon_net(cls, 0.1);
    CHECK(net.size() > 100);
    CHECK(net.size() < 2000);
    check_covering(cls, 0.1, 13);
}

TEST_CASE("three-dimensional net covers") { check_covering(ParameterClass(3, 0.7), 0.2, 14); }

TEST_CASE("net construction respects the point cap") {
    CHECK_THROWS_AS(pem::build_epsilon_net(ParameterClass(6, 1.0), 1e-3),
                    pem::ResourceError);
}

TEST_CASE("class constructor validates its fields") {
    CHECK_THROWS_AS(ParameterClass(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ParameterClass(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ParameterClass(1, -2.0), std::invalid_argument);
}
