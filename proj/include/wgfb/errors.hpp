#pragma once

#include <stdexcept>
#include <string>

namespace wgfb {

/// Rejected input: bad parameter values, mismatched dimensions, unknown keys.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A formula evaluated outside its domain (e.g. m_x^kappa with m_x < 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Magnetization too short to define a principal direction.
class UndefinedDirection : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure did not produce a result meeting its contract.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step-size control failed. Carries the last time the solution was accepted.
class IntegrationError : public ComputationError {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : ComputationError(what + " (last good time " + std::to_string(last_good_time) + ")"),
          last_good_time_(last_good_time) {}

    [[nodiscard]] double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

/// Null space of the Liouvillian is not one-dimensional.
class DegenerateSteadyState : public ComputationError {
public:
    explicit DegenerateSteadyState(int multiplicity)
        : ComputationError("degenerate steady state: null-space multiplicity " +
                           std::to_string(multiplicity)),
          multiplicity_(multiplicity) {}

    [[nodiscard]] int multiplicity() const noexcept { return multiplicity_; }

private:
    int multiplicity_;
};

}  // namespace wgfb
