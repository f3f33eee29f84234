#include "pem/param_space.hpp"

#include <cmath>
#include <stdexcept>

#include "pem/errors.hpp"

namespace pem {

ParameterClass::ParameterClass(int dimension_, double radius_)
    : dimension(dimension_), radius(radius_) {
    if (dimension < 1) {
        throw std::invalid_argument("ParameterClass: dimension must be >= 1");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("ParameterClass: radius must be positive and finite");
    }
}

bool ParameterClass::contains(const Eigen::VectorXd& theta, double tol) const {
    return theta.size() == dimension && theta.norm() <= radius + tol;
}

Eigen::VectorXd project(const Eigen::VectorXd& theta, const ParameterClass& cls) {
    if (theta.size() != cls.dimension) {
        throw std::invalid_argument("project: theta has wrong dimension");
    }
    const double norm = theta.norm();
    if (norm <= cls.radius) {
        return theta;
    }
    return theta * (cls.radius / norm);
}

double covering_number_bound(double epsilon, const ParameterClass& cls) {
    if (!(epsilon > 0.0) || epsilon > cls.radius) {
        throw std::domain_error("covering_number_bound: epsilon must be in (0, radius]");
    }
    return std::pow(3.0 * cls.radius / epsilon, static_cast<double>(cls.dimension));
}

std::vector<Eigen::VectorXd> build_epsilon_net(const ParameterClass& cls, double epsilon,
                                               std::size_t max_points) {
    if (!(epsilon > 0.0)) {
        throw std::domain_error("build_epsilon_net: epsilon must be positive");
    }
    const int d = cls.dimension;
    const double B = cls.radius;
    const double pitch = 2.0 * epsilon / std::sqrt(static_cast<double>(d));
    // Half-diagonal of a lattice cell; lattice points this far outside the
    // ball can still be the nearest lattice point of an interior point.
    const double slack = epsilon;
    const auto half_extent = static_cast<long>(std::floor((B + slack) / pitch));

    const double per_axis = 2.0 * static_cast<double>(half_extent) + 1.0;
    if (std::pow(per_axis, static_cast<double>(d)) > static_cast<double>(max_points)) {
        throw ResourceError("build_epsilon_net: lattice would exceed the point cap");
    }

    std::vector<Eigen::VectorXd> net;
    Eigen::VectorXd point(d);
    std::vector<long> idx(static_cast<std::size_t>(d), -half_extent);
    while (true) {
        for (int k = 0; k < d; ++k) {
            point[k] = pitch * static_cast<double>(idx[static_cast<std::size_t>(k)]);
        }
        const double norm = point.norm();
        if (norm <= B) {
            net.push_back(point);
        } else if (norm <= B + slack) {
            net.push_back(point * (B / norm));
        }
        // odometer increment over the d-dimensional index box
        int axis = 0;
        while (axis < d) {
            auto& v = idx[static_cast<std::size_t>(axis)];
            if (++v <= half_extent) {
                break;
            }
            v = -half_extent;
            ++axis;
        }
        if (axis == d) {
            break;
        }
    }
    return net;
}

}  // namespace pem
