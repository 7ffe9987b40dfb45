#pragma once

#include <stdexcept>
#include <string>

namespace twistmap {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure (quadrature, ODE stepping, Newton) failed to reach its tolerance.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twistmap
