#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace pem {

enum class NoiseKind { kUniform, kRademacher, kTruncatedGaussian };

/**
 * Zero-mean i.i.d. noise law with support contained in [-c, c]. All three
 * families are symmetric about zero, so they are conditionally sub-Gaussian
 * with parameter at most c (Hoeffding).
 */
struct NoiseSpec {
    NoiseKind kind = NoiseKind::kUniform;
    double c = 1.0;      // support half-width, > 0
    double sigma = 1.0;  // Gaussian scale before truncation (kTruncatedGaussian only)

    static NoiseSpec uniform(double c);
    static NoiseSpec rademacher(double c);
    static NoiseSpec truncated_gaussian(double sigma, double c);
};

/// Draws T i.i.d. samples; deterministic given (spec, T, seed).
Eigen::VectorXd sample_noise(const NoiseSpec& spec, int T, std::uint64_t seed);

/// A valid sub-Gaussian parameter for the law: the Hoeffding value c for all
/// three families. Not the tightest constant, but always valid.
double sub_gaussian_sigma(const NoiseSpec& spec);

}  // namespace pem
