#pragma once

#include <stdexcept>
#include <string>

namespace fraclossy {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, order outside the supported range, or a pole of a special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The time stepper blew up. Carries the growth factor seen by the stability probe.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double growth)
      : Error(what), growth_(growth) {}
  double growth() const noexcept { return growth_; }

 private:
  double growth_;
};

}  // namespace fraclossy
