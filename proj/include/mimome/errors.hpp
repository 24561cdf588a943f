#pragma once

#include <stdexcept>
#include <string>

namespace mimome {

// Malformed input: non-finite entries, dimension mismatches, bad parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of the operation (singular or
// non-PD matrix where PD is required).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Channel/antenna regime violates the precondition of a capacity result.
class ConstraintError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Numerical failure inside a solve.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double condition_estimate = 0.0)
        : std::runtime_error(what), condition_(condition_estimate) {}

    /// Estimated condition number of the failing system (0 when unknown).
    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

}  // namespace mimome
