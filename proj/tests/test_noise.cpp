#include <doctest.h>

#include <cmath>

#include "pem/noise.hpp"

using pem::NoiseSpec;

namespace {

struct Moments {
    double mean = 0;
    double variance = 0;
    double third = 0;
};

Moments sample_moments(const Eigen::VectorXd& values) {
    Moments m;
    m.mean = values.mean();
    const auto centered = values.array() - m.mean;
    m.variance = centered.square().sum() / (values.size() - 1);
    m.third = centered.cube().mean();
    return m;
}

// MGF domination certificate: the Monte Carlo estimate of E exp(lambda W)
// must not exceed exp(lambda^2 sigma^2 / 2) by more than three standard
// errors, on an integer grid of lambda.
void check_mgf_certificate(const NoiseSpec& spec, std::uint64_t seed) {
    const double sigma = pem::sub_gaussian_sigma(spec);
    const int n = 200'000;
    const auto w = pem::sample_noise(spec, n, seed);
    for (int lambda = -5; lambda <= 5; ++lambda) {
        if (lambda == 0) {
            continue;
        }
        const auto values = (lambda * w.array()).exp();
        const double mc_mean = values.mean();
        const double sd = std::sqrt((values - mc_mean).square().sum() / (n - 1));
        const double bound = std::exp(0.5 * lambda * lambda * sigma * sigma);
        const double ratio = mc_mean / bound;
        const double ratio_se = sd / std::sqrt(static_cast<double>(n)) / bound;
        CHECK(ratio <= 1.0 + 3.0 * ratio_se);
    }
}

}  // namespace

TEST_CASE("rademacher draws live on {-c, +c}") {
    const auto w = pem::sample_noise(NoiseSpec::rademacher(1.0), 4, 99);
    for (int t = 0; t < 4; ++t) {
        CHECK(std::abs(w[t]) == doctest::Approx(1.0));
    }
    const auto w2 = pem::sample_noise(NoiseSpec::rademacher(2.5), 1000, 3);
    CHECK(w2.cwiseAbs().minCoeff() == doctest::Approx(2.5));
    CHECK(w2.cwiseAbs().maxCoeff() == doctest::Approx(2.5));
}

TEST_CASE("uniform variance matches c^2/3") {
    const double c = 1.7;
    const auto w = pem::sample_noise(NoiseSpec::uniform(c), 100'000, 4242);
    const auto m = sample_moments(w);
    CHECK(m.variance == doctest::Approx(c * c / 3.0).epsilon(0.02));
    CHECK(w.cwiseAbs().maxCoeff() <= c);
}

TEST_CASE("mildly truncated gaussian keeps variance close to sigma^2") {
    const auto w =
        pem::sample_noise(NoiseSpec::truncated_gaussian(1.0, 10.0), 100'000, 555);
    const auto m = sample_moments(w);
    CHECK(m.variance == doctest::Approx(1.0).epsilon(0.02));
    CHECK(w.cwiseAbs().maxCoeff() <= 10.0);
}

TEST_CASE("tight truncation clips the support") {
    const auto w = pem::sample_noise(NoiseSpec::truncated_gaussian(2.0, 0.5), 20'000, 12);
    CHECK(w.cwiseAbs().maxCoeff() <= 0.5);
}

TEST_CASE("sub-gaussian parameter is the support half-width") {
    CHECK(pem::sub_gaussian_sigma(NoiseSpec::rademacher(1.0)) == 1.0);
    CHECK(pem::sub_gaussian_sigma(NoiseSpec::uniform(2.0)) == 2.0);
    CHECK(pem::sub_gaussian_sigma(NoiseSpec::truncated_gaussian(0.3, 0.9)) == 0.9);
}

TEST_CASE("mgf certificate holds for every family") {
    check_mgf_certificate(NoiseSpec::rademacher(1.0), 101);
    check_mgf_certificate(NoiseSpec::uniform(1.3), 102);
    check_mgf_certificate(NoiseSpec::truncated_gaussian(0.8, 2.0), 103);
}

TEST_CASE("all families are symmetric about zero") {
    for (const auto& spec : {NoiseSpec::uniform(1.0), NoiseSpec::rademacher(1.0),
                             NoiseSpec::truncated_gaussian(1.0, 2.0)}) {
        const auto w = pem::sample_noise(spec, 200'000, 77);
        const auto m = sample_moments(w);
        const double se = std::sqrt(m.variance / w.size());
        CHECK(std::abs(m.mean) <= 4.0 * se);
        CHECK(std::abs(m.third) <= 5.0 * std::pow(m.variance, 1.5) / std::sqrt(w.size()) +
                                       1e-3);
    }
}

TEST_CASE("same spec and seed give identical draws") {
    const auto spec = NoiseSpec::truncated_gaussian(1.0, 2.0);
    const auto a = pem::sample_noise(spec, 512, 2024);
    const auto b = pem::sample_noise(spec, 512, 2024);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    const auto c = pem::sample_noise(spec, 512, 2025);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("spec constructors validate parameters") {
    CHECK_THROWS_AS(pem::sample_noise(NoiseSpec::uniform(-1.0), 4, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(pem::sample_noise(NoiseSpec::truncated_gaussian(-1.0, 1.0), 4, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(pem::sample_noise(NoiseSpec::uniform(1.0), 0, 0),
                    std::invalid_argument);
}
