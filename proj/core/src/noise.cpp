#include "pem/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pem {

namespace {

// Uniform in [0,1) from the top 53 bits. Hand-rolled so that streams do not
// depend on the standard library's (unspecified) distribution algorithms.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_symmetric(std::mt19937_64& rng, double c) {
    return c * (2.0 * next_unit(rng) - 1.0);
}

// Box-Muller, one deviate per call (the second is discarded to keep the
// consumption pattern simple).
double next_gaussian(std::mt19937_64& rng, double sigma) {
    double u1 = next_unit(rng);
    while (u1 <= 0.0) {
        u1 = next_unit(rng);
    }
    const double u2 = next_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const NoiseSpec& spec) {
    if (!(spec.c > 0.0)) {
        throw std::invalid_argument("NoiseSpec: c must be positive");
    }
    if (spec.kind == NoiseKind::kTruncatedGaussian && !(spec.sigma > 0.0)) {
        throw std::invalid_argument("NoiseSpec: sigma must be positive");
    }
}

}  // namespace

NoiseSpec NoiseSpec::uniform(double c) { return {NoiseKind::kUniform, c, 0.0}; }

NoiseSpec NoiseSpec::rademacher(double c) { return {NoiseKind::kRademacher, c, 0.0}; }

NoiseSpec NoiseSpec::truncated_gaussian(double sigma, double c) {
    return {NoiseKind::kTruncatedGaussian, c, sigma};
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec, int T, std::uint64_t seed) {
    validate(spec);
    if (T < 1) {
        throw std::invalid_argument("sample_noise: T must be >= 1");
    }
    std::mt19937_64 rng(seed);
    Eigen::VectorXd w(T);
    switch (spec.kind) {
        case NoiseKind::kUniform:
            for (int t = 0; t < T; ++t) {
                w[t] = next_symmetric(rng, spec.c);
            }
            break;
        case NoiseKind::kRademacher:
            for (int t = 0; t < T; ++t) {
                w[t] = (rng() >> 63) ? spec.c : -spec.c;
            }
            break;
        case NoiseKind::kTruncatedGaussian:
            for (int t = 0; t < T; ++t) {
                double x = next_gaussian(rng, spec.sigma);
                while (std::abs(x) > spec.c) {
                    x = next_gaussian(rng, spec.sigma);
                }
                w[t] = x;
            }
            break;
    }
    return w;
}

double sub_gaussian_sigma(const NoiseSpec& spec) {
    validate(spec);
    return spec.c;
}

}  // namespace pem
