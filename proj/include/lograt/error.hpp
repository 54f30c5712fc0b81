#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lograt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input table. `line()` is 1-based (header is line 1), 0 if unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A penalized IRLS run that did not reach its convergence tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<double>& deviance_trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace lograt
