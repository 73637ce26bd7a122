#pragma once

#include <stdexcept>
#include <string>

namespace fracsearch {

/// Invalid input: bad coordinates, malformed data, unfittable points.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// The transformed series has no oscillation strong enough to call a period.
class NoDominantOscillation : public DomainError {
  public:
    using DomainError::DomainError;
};

/// The series is too short for the requested windowing.
class InsufficientSpan : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Norm drift or another sign that the evolution kernel is broken.
class NumericIntegrityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A run would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace fracsearch
