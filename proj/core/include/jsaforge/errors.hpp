#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jsaforge {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: unknown keys, missing files, inconsistent specs.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed structured-text or grid file. `line` is 1-based, 0 when unknown.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : ConfigError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A computation left its valid numerical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class NoPhaseMatchingError : public DomainError {
public:
    using DomainError::DomainError;
};

class CurveTruncatedError : public DomainError {
public:
    using DomainError::DomainError;
};

class ResolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

class DisjointSupportError : public DomainError {
public:
    using DomainError::DomainError;
};

class UncalibratedMapError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace jsaforge
