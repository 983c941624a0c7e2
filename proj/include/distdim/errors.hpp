#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distdim {

/// Malformed textual input (numbers, norm files, CSV rows).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A gradient was requested where the norm is not differentiable.
class GradientUndefined : public std::domain_error {
 public:
  GradientUndefined(const std::string& what, std::size_t pin)
      : std::domain_error(what), pin_(pin) {}
  std::size_t pin() const noexcept { return pin_; }

 private:
  std::size_t pin_;
};

/// An operation would materialize more points or pairs than allowed.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace distdim
