#pragma once

#include <stdexcept>
#include <string>

namespace cjlab {

/// Invalid parameters: non-prime modulus, negative θ, bad config fields.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Mathematically undefined request: division by zero, evaluation off the grid closure.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A rescaling orbit ran past the declared grid depth.
class DepthError : public DomainError {
public:
    explicit DepthError(const std::string& what) : DomainError(what) {}
};

}  // namespace cjlab
