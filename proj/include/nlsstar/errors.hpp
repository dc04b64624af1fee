#pragma once

#include <stdexcept>
#include <string>

namespace nlsstar {

/// Argument outside the admissible parameter window (CLI exit code 2).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation is undefined in the requested nonlinearity regime.
class RegimeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// No existence threshold exists for the requested configuration.
class NoThresholdError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A bracketing or root search ran out of room (CLI exit code 3).
class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No soliton piece with the requested (mass, endpoint value) was found.
class InfeasiblePair : public SearchFailure {
public:
    InfeasiblePair(const std::string& what, double mass, double endpoint_value,
                   double bracket_low, double bracket_high, int edge = -1)
        : SearchFailure(what),
          mass_(mass),
          endpoint_value_(endpoint_value),
          bracket_low_(bracket_low),
          bracket_high_(bracket_high),
          edge_(edge) {}

    double mass() const noexcept { return mass_; }
    double endpoint_value() const noexcept { return endpoint_value_; }
    double bracket_low() const noexcept { return bracket_low_; }
    double bracket_high() const noexcept { return bracket_high_; }
    /// Edge index when raised from a reduced-energy evaluation, -1 otherwise.
    int edge() const noexcept { return edge_; }

private:
    double mass_;
    double endpoint_value_;
    double bracket_low_;
    double bracket_high_;
    int edge_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

}  // namespace detail

}  // namespace nlsstar
