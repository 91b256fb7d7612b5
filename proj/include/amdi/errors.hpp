#pragma once

#include <stdexcept>
#include <string>

namespace amdi {

// Argument outside the mathematical domain of an operation (negative
// intensity, probability outside [0,1], ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A configuration violates a module invariant. The CLI maps this to exit 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Parameter estimation could not produce a usable bound (missing category,
// empty X-basis single-photon bound, ...). The CLI maps this to exit 3.
class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace amdi
