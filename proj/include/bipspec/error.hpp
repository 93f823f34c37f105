#pragma once

#include <stdexcept>
#include <string>

namespace bipspec {

// Invalid parameter or argument outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A well-formed request that has no solution (infeasible degree spec,
// unbalanced factor demands, non-integral expected degrees).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string reason, const std::string& what)
        : std::runtime_error(what), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

// Quadrature failed to reach its tolerance; carries the tolerance achieved.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

// Exhaustive routine asked to run past its enumeration guard.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace bipspec
