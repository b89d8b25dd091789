#pragma once

#include <stdexcept>
#include <string>

namespace robinquad {

// Base class so callers can catch everything from the library in one place.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Input outside the mathematical domain of an operation (c <= 0, x < 0 for g^-1, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

// Degenerate geometry: collinear vertices and similar.
struct GeometryError : Error {
    explicit GeometryError(const std::string& msg) : Error("geometry", msg) {}
};

// Caller broke an API precondition (mismatched sizes, unsplit mesh, ...).
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error("contract", msg) {}
};

// Iterative method failed to converge or a factorization broke down.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error("numerical", msg) {}
};

// Eigenvalue too close to its neighbour for a stable derivative.
struct ConditioningError : Error {
    ConditioningError(const std::string& msg, double gap)
        : Error("conditioning", msg), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

}  // namespace robinquad
