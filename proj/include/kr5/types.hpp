#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kr5 {

using Complex = std::complex<double>;

inline constexpr int kLevels = 5;

/// Amplitudes c1..c5 in the interaction representation (index 0 is |1>).
using StateVector = std::array<Complex, kLevels>;
using RealVector5 = std::array<double, kLevels>;
using Matrix5c = Eigen::Matrix<Complex, kLevels, kLevels>;
using Matrix5d = Eigen::Matrix<double, kLevels, kLevels>;
using Vector5c = Eigen::Matrix<Complex, kLevels, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input for which the requested analytic object does not exist.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class SingularDenominator : public Error {
 public:
  using Error::Error;
};

/// Integrator failure (step underflow, non-finite state); carries the offending time.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double xi) : Error(what), xi_(xi) {}
  double xi() const noexcept { return xi_; }

 private:
  double xi_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A ratio P3/P4 that may be infinite or 0/0.
struct BranchingRatio {
  enum class Kind { Finite, Infinite, Indeterminate };
  Kind kind = Kind::Indeterminate;
  double value = 0.0;

  static BranchingRatio finite(double v) { return {Kind::Finite, v}; }
  static BranchingRatio infinite() { return {Kind::Infinite, 0.0}; }
  static BranchingRatio indeterminate() { return {Kind::Indeterminate, 0.0}; }

  bool is_finite() const { return kind == Kind::Finite; }
  /// Finite value, +inf, or NaN.
  double as_double() const;
  std::string to_string() const;
};

inline double squared_norm(const StateVector& s) {
  double n = 0.0;
  for (const auto& c : s) n += std::norm(c);
  return n;
}

}  // namespace kr5
