#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace pem {

/**
 * Compact parameter class: the closed Euclidean ball of radius `radius` in
 * `dimension` dimensions. Every estimator and net construction in this
 * library stays inside one of these.
 */
struct ParameterClass {
    int dimension;  // d >= 1
    double radius;  // B > 0

    ParameterClass(int dimension, double radius);

    bool contains(const Eigen::VectorXd& theta, double tol = 0.0) const;
};

/// Euclidean projection onto the ball. Identity inside, radial scaling
/// outside; idempotent and 1-Lipschitz. Throws std::invalid_argument on a
/// dimension mismatch.
Eigen::VectorXd project(const Eigen::VectorXd& theta, const ParameterClass& cls);

/// Upper bound (3B/eps)^d on the covering number of the ball at resolution
/// eps. Only valid for eps in (0, B]; throws std::domain_error outside that
/// range.
double covering_number_bound(double epsilon, const ParameterClass& cls);

/**
 * Builds a finite epsilon-net of the ball: every point of the class is
 * within `epsilon` of some net point, and all net points lie in the class.
 *
 * The net is a cubic lattice of pitch 2*eps/sqrt(d) anchored at the origin.
 * Lattice points just outside the ball whose cell still touches it are
 * projected back onto the sphere, which preserves the covering radius
 * (projection onto a convex set is 1-Lipschitz). Cardinality is not
 * minimal; see covering_number_bound for the theoretical bound.
 *
 * Throws ResourceError if the lattice would exceed `max_points`.
 */
std::vector<Eigen::VectorXd> build_epsilon_net(const ParameterClass& cls, double epsilon,
                                               std::size_t max_points = 10'000'000);

}  // namespace pem
