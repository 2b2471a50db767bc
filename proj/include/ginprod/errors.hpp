#pragma once

#include <stdexcept>
#include <string>

namespace ginprod {

// Bad input: outside an operation's domain (poles, angles outside (0, pi),
// malformed parameter sets).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The angle has a negative discriminant or lies off the branch that
// parametrizes the limiting law.
class InadmissibleAngle : public DomainError {
 public:
  InadmissibleAngle(double theta, double discriminant, const std::string& why)
      : DomainError(why), theta_(theta), discriminant_(discriminant) {}
  double theta() const { return theta_; }
  double discriminant() const { return discriminant_; }

 private:
  double theta_;
  double discriminant_;
};

// Numerical failure after valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BranchTrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Contour settings cannot meet the requested tolerance.
class ContourConfigError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Cancellation in an alternating sum exceeded what the selected
// accumulation mode can resolve.
class PrecisionError : public NumericalError {
 public:
  PrecisionError(const std::string& what, double digits_lost)
      : NumericalError(what), digits_lost_(digits_lost) {}
  double digits_lost() const { return digits_lost_; }

 private:
  double digits_lost_;
};

}  // namespace ginprod
