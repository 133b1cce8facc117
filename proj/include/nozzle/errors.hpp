#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nozzle {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. rho <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Value outside the invertible range, carrying the offending value.
class OutOfRangeError : public Error {
public:
    OutOfRangeError(const std::string& what, double value) : Error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// No state with the requested property exists (e.g. no sonic state, supercritical flux).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Data violating a theorem hypothesis: signs, compatibility, edge conditions.
class InvalidDataError : public Error {
public:
    using Error::Error;
};

/// Neumann data whose discrete integral does not vanish.
class SolvabilityError : public Error {
public:
    SolvabilityError(const std::string& what, double defect) : Error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// Iterative method failed to reach its tolerance. `history` holds the monitored norm per iteration.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// u1 fell below the positivity floor required for streamline parameterization by x1.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Step-halving check of a fixed-step integrator disagreed beyond tolerance.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// An iterate left the admissible set of the fixed-point map.
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& what, double norm) : Error(what), norm_(norm) {}
    double norm() const noexcept { return norm_; }

private:
    double norm_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace nozzle
