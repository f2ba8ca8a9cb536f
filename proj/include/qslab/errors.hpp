// errors.hpp — Exception hierarchy shared by every qslab module

#pragma once

#include <stdexcept>
#include <string>

namespace qslab {

// Base class. `code()` is the short tag written into CSV status columns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "domain"; }
};

// Adaptive quadrature did not reach its tolerance; carries the estimate it did reach.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }
    const char* code() const noexcept override { return "accuracy"; }

private:
    double achieved_;
};

class StepSizeError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "step_size"; }
};

class SizeError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "size"; }
};

class DiagnosticsError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "diagnostics"; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "numerical"; }
};

class StateError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "state"; }
};

class InvariantError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "invariant"; }
};

class InconsistencyError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "inconsistency"; }
};

class ParameterError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "parameter"; }
};

class IterationError : public Error {
public:
    IterationError(const std::string& what, double previous, double last)
        : Error(what + " (last iterates " + std::to_string(previous) + ", " + std::to_string(last) + ")"),
          previous_(previous), last_(last) {}
    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }
    const char* code() const noexcept override { return "iteration"; }

private:
    double previous_;
    double last_;
};

// Bad user configuration (maps to CLI exit status 1).
class ConfigError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "config"; }
};

} // namespace qslab
