#pragma once

#include <stdexcept>
#include <string>

namespace boxlab {

/// Bad arguments: wrong shapes, unknown registers, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical invariant (unitarity, normalization, PSD, round trip) failed
/// beyond its tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {
inline constexpr double kNorm = 1e-12;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kBoxNorm = 1e-12;
inline constexpr double kViolation = 1e-10;
}  // namespace tol

}  // namespace boxlab
