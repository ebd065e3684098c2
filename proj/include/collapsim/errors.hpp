#pragma once

#include <stdexcept>
#include <string>

namespace collapsim {

/// Argument outside the mathematical domain of an operation (u outside (0,1), tau outside [0, dt], ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A configuration that cannot be simulated or analyzed (negative widths, empty sampling window, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or root finding failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace collapsim
