#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems with user-supplied input (files, configuration, references).
/// The command-line tool maps these to exit status 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A malformed fixed-column field. Carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Missing section, missing terminator or empty input.
class StructureError : public InputError {
public:
    using InputError::InputError;
};

/// A record or system violating a model invariant.
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

/// A record referring to a bus, branch or element that does not exist.
class ReferenceError : public InputError {
public:
    using InputError::InputError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Singular matrices, zero-impedance elements, non-finite states.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Branch with zero series reactance.
class SingularElementError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Integration produced a non-finite state.
class BlowupError : public NumericalError {
public:
    BlowupError(double time_s, const std::string& what);
    double time() const noexcept { return time_s_; }

private:
    double time_s_;
};

/// Newton-Raphson did not reach tolerance. Carries the mismatch history.
class ConvergenceError : public NumericalError {
public:
    explicit ConvergenceError(std::vector<double> trace);
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Clearing the fault separated the network into pieces.
class IslandingError : public Error {
public:
    using Error::Error;
};

}  // namespace cbrisk
