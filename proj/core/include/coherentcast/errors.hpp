#pragma once

#include <stdexcept>
#include <string>

namespace coherentcast {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (unknown activation, bad beta, empty partition...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition (shape mismatch, m = 0, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A stored object no longer satisfies its invariant.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, singular systems, divergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Not enough data to form a single sample.
class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing input file. Carries the path and, for parse failures, the 1-based line.
class InputError : public Error {
public:
    InputError(std::string path, std::size_t line, const std::string& what)
        : Error(line == 0 ? path + ": " + what : path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace coherentcast
