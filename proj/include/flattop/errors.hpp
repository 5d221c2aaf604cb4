#pragma once

#include <stdexcept>
#include <string>

namespace flattop {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclass onto a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// Precondition or parameter-domain violation (bad c, negative bandwidth, ...).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "quadrature"; }
};

/// The bandwidth criterion never triggered on the supplied frequency range.
class NoPlateauError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "no-plateau"; }
};

/// Malformed input file (CSV/JSON).
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = -1) : Error(what), line_(line) {}
    const char* kind() const noexcept override { return "parse"; }
    long line() const noexcept { return line_; }

private:
    long line_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

}  // namespace flattop
