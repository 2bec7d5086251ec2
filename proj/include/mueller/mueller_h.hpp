/**
 * @file mueller_h.hpp
 * @brief The correspondence between a real 4x4 matrix M acting on Stokes
 * vectors and the Hermitian 4x4 matrix H acting on coherency matrices.
 *
 * With the coherency matrix flattened as (Phi11, Phi12, Phi21, Phi22),
 * i.e. composite index 2*row + col, the induced map on the flattened
 * vector is B = A^{-1} M A. H is B with its middle indices exchanged:
 *
 *     H[2i+k][2j+l] = B[2i+j][2k+l]
 *
 * so that Phi'_{ij} = sum_{kl} H_{ik,jl} Phi_{kl}. A Jones system J has
 * B = J (x) J^* and H = vec(J) vec(J)^dagger; H >= 0 exactly when M is a
 * positive sum of such systems.
 */

#pragma once

#include "mueller/common.hpp"
#include "mueller/polarization.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace mueller {

struct MuellerMatrix {
  Matrix4r m = Matrix4r::Identity();

  static MuellerMatrix identity() { return {}; }
  static MuellerMatrix diagonal(double d1, double d2, double d3) {
    return {Vector4r(1.0, d1, d2, d3).asDiagonal()};
  }
};

struct HMatrix {
  Matrix4c h = Matrix4c::Zero();

  double trace() const { return h.trace().real(); }
};

/// Swaps the middle pair of the four 2-valued indices of a 4x4 matrix,
/// X[2i+j][2k+l] -> Y[2i+k][2j+l]. The map is its own inverse.
inline Matrix4c reshuffle(const Matrix4c& x) {
  Matrix4c y;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) y(2 * i + k, 2 * j + l) = x(2 * i + j, 2 * k + l);
  return y;
}

inline HMatrix h_from_mueller(const MuellerMatrix& m) {
  const Matrix4c b = a_inverse() * m.m.cast<cdouble>() * a_matrix();
  HMatrix h{reshuffle(b)};
  const double scale = 1.0 + h.h.norm();
  if (detail::hermitian_residual(h.h) > 1e-12 * scale)
    throw InternalConsistency("H from a real matrix is not Hermitian");
  return h;
}

inline MuellerMatrix mueller_from_h(const HMatrix& h) {
  const double hscale = 1.0 + std::abs(h.h.trace());
  if (detail::hermitian_residual(h.h) > kDefaultTol * hscale)
    throw InvalidInput("H is not Hermitian");
  const Matrix4c m = a_matrix() * reshuffle(h.h) * a_inverse();
  if (detail::max_imag(m) > 1e-12 * (1.0 + m.norm()))
    throw InternalConsistency("Mueller matrix from Hermitian H has an imaginary part");
  return {m.real()};
}

// (J11, J12, J21, J22).
inline Vector4c vec_from_jones(const JonesMatrix& j) {
  return Vector4c(j.j(0, 0), j.j(0, 1), j.j(1, 0), j.j(1, 1));
}

inline JonesMatrix jones_from_vec(const Vector4c& v) {
  JonesMatrix j;
  j.j << v(0), v(1), v(2), v(3);
  return j;
}

inline MuellerMatrix mueller_jones_from_jones(const JonesMatrix& j) {
  const Matrix2c jc = j.j.conjugate();
  Matrix4c kron;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) kron.block<2, 2>(2 * r, 2 * c) = j.j(r, c) * jc;
  const Matrix4c m = a_matrix() * kron * a_inverse();
  return {m.real()};
}

inline StokesVector apply_mueller(const MuellerMatrix& m, const StokesVector& s) {
  return StokesVector(Vector4r(m.m * s.s));
}

struct HSpectrum {
  Eigen::Vector4d values;  // ascending
  Matrix4c vectors;        // columns
};

inline HSpectrum h_spectrum(const HMatrix& h) {
  // Hermitian part; exact for H produced from a real M up to roundoff.
  const Matrix4c sym = 0.5 * (h.h + h.h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(sym);
  if (es.info() != Eigen::Success) throw InternalConsistency("eigensolver failed on 4x4 H");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_h_eigenvalue(const HMatrix& h) { return h_spectrum(h).values(0); }

namespace detail {

// Global phase fixed so the largest-magnitude component is real positive.
// Near-ties pick the lowest index.
inline Vector4c fix_phase(const Vector4c& v) {
  const double maxabs = v.cwiseAbs().maxCoeff();
  if (maxabs == 0.0) return v;
  int idx = 0;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(v(k)) >= maxabs * (1.0 - 1e-12)) {
      idx = k;
      break;
    }
  }
  const cdouble phase = v(idx) / std::abs(v(idx));
  Vector4c out = v * std::conj(phase);
  out(idx) = std::abs(out(idx));
  return out;
}

}  // namespace detail

/// Returns the Jones matrix of M when H is a rank-one projection
/// (largest eigenvalue positive, all others within tol of zero relative
/// to it), otherwise nullopt.
inline std::optional<JonesMatrix> is_mueller_jones(const MuellerMatrix& m, double tol = kDefaultTol) {
  const HSpectrum sp = h_spectrum(h_from_mueller(m));
  const double top = sp.values(3);
  if (!(top > 0.0)) return std::nullopt;
  for (int k = 0; k < 3; ++k)
    if (std::abs(sp.values(k)) > tol * top) return std::nullopt;
  const Vector4c v = detail::fix_phase(sp.vectors.col(3));
  return jones_from_vec(std::sqrt(top) * v);
}

struct JonesTerm {
  double weight = 0.0;  // eigenvalue of H
  JonesMatrix jones;    // unit Frobenius norm
};

struct JonesDecomposition {
  std::vector<JonesTerm> terms;

  MuellerMatrix reconstruct() const {
    Matrix4r acc = Matrix4r::Zero();
    for (const auto& t : terms) acc += t.weight * mueller_jones_from_jones(t.jones).m;
    return {acc};
  }

  // ||reconstruct() - M||_F / ||M||_F.
  double residual(const MuellerMatrix& m) const {
    const double denom = m.m.norm();
    const double diff = (reconstruct().m - m.m).norm();
    return denom > 0.0 ? diff / denom : diff;
  }
};

/// Spectral split of H into weighted rank-one terms, one per eigenvalue
/// above tol * tr H, sorted by weight descending. Throws NotPhysical
/// (carrying the minimum eigenvalue) when H is not PSD within tol * tr H.
inline JonesDecomposition decompose_convex(const MuellerMatrix& m, double tol = kDefaultTol) {
  const HMatrix h = h_from_mueller(m);
  const double tr = h.trace();
  const HSpectrum sp = h_spectrum(h);
  const double lmin = sp.values(0);
  if (lmin < -tol * tr || tr < 0.0)
    throw NotPhysical("H is not positive semidefinite (min eigenvalue " + std::to_string(lmin) + ")",
                      lmin);
  if (tr == 0.0) throw InvalidInput("zero matrix has no Jones decomposition");

  JonesDecomposition out;
  for (int k = 3; k >= 0; --k) {
    const double lambda = sp.values(k);
    if (lambda <= tol * tr) break;
    out.terms.push_back({lambda, jones_from_vec(detail::fix_phase(sp.vectors.col(k)))});
  }
  return out;
}

}  // namespace mueller
