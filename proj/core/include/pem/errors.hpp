#pragma once

#include <stdexcept>
#include <string>

namespace pem {

/// Malformed configuration (bad key, missing field, invalid range).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The optimizer could not produce a finite estimate.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested computation would exceed a resource cap.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pem
