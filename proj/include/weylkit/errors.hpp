#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace weylkit {

/// Multi-index or matrix index outside the truncated basis.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain (non-finite point, lambda = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inputs that are individually valid but inconsistent with each other.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The requested quantity is not representable in the truncated basis.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid function violates the decay assumptions of a discrete integral.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const { return measured_; }

 private:
  double measured_;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid run configuration or command line; maps to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "%.3e" rendering of a double for error messages.
inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace weylkit
