#pragma once

#include <stdexcept>
#include <string>

namespace srgg {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Iterative method (series, quadrature) failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Operation is not available for the requested domain or connection family.
class UnsupportedError : public std::invalid_argument {
  public:
    explicit UnsupportedError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed textual input (connection or domain spec strings, config files).
class ParseError : public std::invalid_argument {
  public:
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace srgg
