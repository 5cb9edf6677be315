#pragma once

#include <stdexcept>
#include <string>

namespace driftband {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument to an operation (psi <= 0, dimension mismatch, ...).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// A requested discretization would exceed the configured arm budget.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

// An operation was invoked on an object in an unusable state (empty arm set).
class InvalidStateError : public Error {
public:
    using Error::Error;
};

// A diagnostic is mathematically undefined for the given inputs.
class DiagnosticUndefinedError : public Error {
public:
    using Error::Error;
};

// Config file / CLI flag problems.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem problems, always carrying the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

// A runtime invariant check on an emitted trace failed.
class InvariantViolationError : public Error {
public:
    using Error::Error;
};

} // namespace driftband
