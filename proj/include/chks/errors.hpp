#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chks {

/// Base class of every error raised by the simulator. `kind()` is a stable
/// short tag used in CSV status columns and exit-code mapping.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

/// Argument outside the domain of a singular potential (|r| >= 1).
class DomainViolation : public Error {
public:
    DomainViolation(double value, double margin);
    const char* kind() const noexcept override { return "DomainViolation"; }
    double value;
    double margin; ///< 1 - |value|, nonpositive when raised
};

class NegativeSigma : public Error {
public:
    explicit NegativeSigma(double value);
    const char* kind() const noexcept override { return "NegativeSigma"; }
    double value;
};

/// The truncated nutrient variable reached the saturation level n + 1.
class RangeViolation : public Error {
public:
    RangeViolation(double value, double limit, std::size_t cell);
    const char* kind() const noexcept override { return "RangeViolation"; }
    double value;
    double limit;
    std::size_t cell;
};

class LinearSolveFailure : public Error {
public:
    LinearSolveFailure(const std::string& solver, int iterations, double relResidual);
    const char* kind() const noexcept override { return "LinearSolveFailure"; }
    int iterations;
    double relResidual;
};

class NewtonDivergence : public Error {
public:
    NewtonDivergence(const std::string& why, std::vector<double> history);
    const char* kind() const noexcept override { return "NewtonDivergence"; }
    std::vector<double> residualHistory;
};

class PositivityLoss : public Error {
public:
    PositivityLoss(double minValue, std::size_t cell);
    const char* kind() const noexcept override { return "PositivityLoss"; }
    double minValue;
    std::size_t cell;
};

/// Explicit-flux step restriction could not be met after the allowed halvings.
class StepRestriction : public Error {
public:
    StepRestriction(double dtTried, double dtAllowed);
    const char* kind() const noexcept override { return "StepRestriction"; }
    double dtTried;
    double dtAllowed;
};

/// Sizes or grids of two operands do not match.
class ShapeMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ShapeMismatch"; }
};

/// Rejected configuration. `issues` holds one human-readable line per problem.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const char* kind() const noexcept override { return "ConfigError"; }
    std::vector<std::string> issues;
};

/// Shortest round-trip decimal form of a double (used in messages and CSV).
std::string formatNumber(double value);

} // namespace chks
