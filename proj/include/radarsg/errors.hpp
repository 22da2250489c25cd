#pragma once

#include <stdexcept>
#include <string>

namespace radarsg {

// Argument outside the mathematical domain of a function (a <= 0 for the
// incomplete gamma, alpha <= 1 for the interference mean, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An improper integral or series that does not converge for the given input.
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure that failed to reach its tolerance. `where` carries
// the abscissa (frequency, node, grid point) at which it gave up.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double where)
        : std::runtime_error(what + " (at " + std::to_string(where) + ")"), where_(where) {}

    double where() const noexcept { return where_; }

private:
    double where_;
};

// Scenario / run-spec validation failure. `field` names the offending entry.
class InvariantError : public std::invalid_argument {
public:
    InvariantError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class SchemaError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

}  // namespace radarsg
