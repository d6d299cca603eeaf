#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualpair {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. Carries the byte offset of the failure and the
/// set of tokens that would have been accepted there.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::vector<std::string> expected = {});

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Evaluation failure: unbound name or a domain violation.
class EvalError : public Error {
public:
    EvalError(std::string message, std::string subexpression);

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

/// A value violates a structural invariant (chart mismatch, non-antisymmetric
/// bivector, ill-defined torus map, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration document. `path` locates the offending field, e.g.
/// `bivectors[0].matrix[1][0]`.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message);

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace dualpair
