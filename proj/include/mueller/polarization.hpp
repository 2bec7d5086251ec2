/**
 * @file polarization.hpp
 * @brief Single-point polarization states: Jones vectors, coherency
 * matrices and Stokes vectors, plus the conversions among them.
 *
 * Conventions:
 *  - A Jones vector holds envelope amplitudes (E1 along x, E2 along y);
 *    the carrier e^{i(kz - wt)} is never stored.
 *  - The tau basis is tau0 = I, tau1 = sigma_z, tau2 = sigma_x,
 *    tau3 = sigma_y, so that S_a = tr(tau_a Phi) and
 *    Phi = 1/2 sum_a S_a tau_a.
 */

#pragma once

#include "mueller/common.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <utility>

namespace mueller {

struct JonesVector {
  cdouble e1{0.0};
  cdouble e2{0.0};

  Vector2c vec() const { return Vector2c(e1, e2); }
  static JonesVector from_vec(const Vector2c& v) { return {v(0), v(1)}; }

  double intensity() const { return std::norm(e1) + std::norm(e2); }

  // Polarization ratio E1/E2; absent when E2 vanishes.
  std::optional<cdouble> ratio() const {
    if (std::abs(e2) == 0.0) return std::nullopt;
    return e1 / e2;
  }
};

struct JonesMatrix {
  Matrix2c j = Matrix2c::Identity();

  static JonesMatrix identity() { return {}; }
};

struct StokesVector {
  Vector4r s = Vector4r::Zero();

  StokesVector() = default;
  explicit StokesVector(const Vector4r& v) : s(v) {}
  StokesVector(double s0, double s1, double s2, double s3) : s(s0, s1, s2, s3) {}

  double operator[](int i) const { return s(i); }

  // S^T G S with G = diag(1, -1, -1, -1).
  double lorentz_norm() const { return s(0) * s(0) - s.tail<3>().squaredNorm(); }

  // Only meaningful for vectors inside the cone.
  double degree_of_polarization() const { return s.tail<3>().norm() / s(0); }
};

inline const Eigen::DiagonalMatrix<double, 4>& minkowski_metric() {
  static const Eigen::DiagonalMatrix<double, 4> g(1.0, -1.0, -1.0, -1.0);
  return g;
}

inline const std::array<Matrix2c, 4>& tau_basis() {
  static const std::array<Matrix2c, 4> tau = [] {
    const cdouble i{0.0, 1.0};
    std::array<Matrix2c, 4> t;
    t[0] << 1, 0, 0, 1;
    t[1] << 1, 0, 0, -1;
    t[2] << 0, 1, 1, 0;
    t[3] << 0, -i, i, 0;
    return t;
  }();
  return tau;
}

// Maps the column vector (Phi11, Phi12, Phi21, Phi22) to the Stokes vector.
inline const Matrix4c& a_matrix() {
  static const Matrix4c a = [] {
    const cdouble i{0.0, 1.0};
    Matrix4c m;
    m << 1, 0, 0, 1,
         1, 0, 0, -1,
         0, 1, 1, 0,
         0, i, -i, 0;
    return m;
  }();
  return a;
}

// A^{-1} = A^dagger / 2.
inline const Matrix4c& a_inverse() {
  static const Matrix4c inv = 0.5 * a_matrix().adjoint();
  return inv;
}

/// Hermitian 2x2 polarization matrix. Construction projects onto the
/// Hermitian part after checking the input is Hermitian to within
/// 1e-9 (1 + |tr|). Positivity is not required here so that unphysical
/// Stokes vectors still have a coherency image; use is_physical().
class CoherencyMatrix {
 public:
  CoherencyMatrix() : phi_(Matrix2c::Zero()) {}

  explicit CoherencyMatrix(const Matrix2c& phi) {
    const double scale = 1.0 + std::abs(phi.trace());
    if (detail::hermitian_residual(phi) > kDefaultTol * scale)
      throw InvalidInput("coherency matrix is not Hermitian");
    phi_ = 0.5 * (phi + phi.adjoint());
  }

  const Matrix2c& matrix() const { return phi_; }
  cdouble operator()(int r, int c) const { return phi_(r, c); }

  double trace() const { return phi_.trace().real(); }
  double determinant() const { return phi_.determinant().real(); }

  // Ascending.
  Eigen::Vector2d eigenvalues() const {
    const double t = trace();
    const double d = determinant();
    const double disc = std::sqrt(std::max(0.0, t * t / 4.0 - d));
    return {t / 2.0 - disc, t / 2.0 + disc};
  }

  bool is_physical(double tol = kDefaultTol) const {
    return trace() > 0.0 && eigenvalues()(0) >= -tol * trace();
  }

  bool is_pure(double tol = kDefaultTol) const {
    const double t = trace();
    return t > 0.0 && std::abs(determinant()) <= tol * t * t;
  }

 private:
  Matrix2c phi_;
};

inline StokesVector stokes_from_coherency(const CoherencyMatrix& phi) {
  const auto& tau = tau_basis();
  Vector4r s;
  for (int a = 0; a < 4; ++a) s(a) = (tau[a] * phi.matrix()).trace().real();
  return StokesVector(s);
}

// Raw-matrix entry point: rejects non-Hermitian input.
inline StokesVector stokes_from_coherency(const Matrix2c& phi) {
  return stokes_from_coherency(CoherencyMatrix(phi));
}

inline CoherencyMatrix coherency_from_stokes(const StokesVector& s) {
  const auto& tau = tau_basis();
  Matrix2c phi = Matrix2c::Zero();
  for (int a = 0; a < 4; ++a) phi += 0.5 * s[a] * tau[a];
  return CoherencyMatrix(phi);
}

enum class StokesClass { OutsideCone, PureBoundary, MixedInterior };

inline const char* to_string(StokesClass c) {
  switch (c) {
    case StokesClass::OutsideCone: return "OutsideCone";
    case StokesClass::PureBoundary: return "PureBoundary";
    case StokesClass::MixedInterior: return "MixedInterior";
  }
  return "?";
}

inline StokesClass validate_stokes(const StokesVector& s, double tol = kDefaultTol) {
  const double s0 = s[0];
  if (!(s0 > 0.0)) return StokesClass::OutsideCone;
  const double q = s.lorentz_norm();
  const double slack = tol * s0 * s0;
  if (std::abs(q) <= slack) return StokesClass::PureBoundary;
  if (q > slack) return StokesClass::MixedInterior;
  return StokesClass::OutsideCone;
}

struct EnsembleMember {
  double weight = 1.0;
  JonesVector e;
};

inline CoherencyMatrix coherency_from_ensemble(std::span<const EnsembleMember> members) {
  if (members.empty()) throw InvalidInput("empty ensemble");
  Matrix2c acc = Matrix2c::Zero();
  double total = 0.0;
  for (const auto& m : members) {
    if (!(m.weight >= 0.0)) throw InvalidInput("ensemble weights must be non-negative");
    const Vector2c v = m.e.vec();
    acc += m.weight * (v * v.adjoint());
    total += m.weight;
  }
  if (!(total > 0.0)) throw InvalidInput("ensemble weights sum to zero");
  return CoherencyMatrix(acc / total);
}

inline JonesVector jones_apply(const JonesMatrix& j, const JonesVector& e) {
  return JonesVector::from_vec(j.j * e.vec());
}

inline CoherencyMatrix jones_apply(const JonesMatrix& j, const CoherencyMatrix& phi) {
  return CoherencyMatrix(j.j * phi.matrix() * j.j.adjoint());
}

}  // namespace mueller
