#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace mueller {

using cdouble = std::complex<double>;

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix4r = Eigen::Matrix4d;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;
using Vector4r = Eigen::Vector4d;

// Relative tolerance used by every classification unless overridden.
inline constexpr double kDefaultTol = 1e-9;

// Caller supplied something outside an operation's domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix whose associated H has a negative eigenvalue was asked for a
// Jones decomposition.
class NotPhysical : public std::runtime_error {
 public:
  NotPhysical(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// An identity that holds mathematically failed numerically.
class InternalConsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

template <typename Derived>
double hermitian_residual(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Imaginary parts of a complex matrix, largest magnitude.
template <typename Derived>
double max_imag(const Eigen::MatrixBase<Derived>& m) {
  return m.imag().cwiseAbs().maxCoeff();
}

}  // namespace detail

}  // namespace mueller
