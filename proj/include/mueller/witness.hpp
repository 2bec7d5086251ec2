/**
 * @file witness.hpp
 * @brief Beams restricted to two orthonormal spatial modes: states on
 * C^2 (polarization) (x) C^2 (spatial), and the action of a Mueller
 * matrix on their 4x4 beam-coherence-polarization (BCP) matrix.
 *
 * Amplitudes are ordered (C11, C12, C21, C22), polarization index slow
 * and spatial index fast, so composite index = 2 * pol + mode. The
 * Mueller action goes through H and leaves the spatial index alone:
 *
 *     Phi'[2i+a][2j+b] = sum_{k,l} H[2i+k][2j+l] Phi[2k+a][2l+b]
 *
 * Fed the entangled beam C = (1, 0, 0, 1), the output is H itself, so a
 * negative eigenvalue of H shows up as an unphysical output beam.
 */

#pragma once

#include "mueller/common.hpp"
#include "mueller/mueller_h.hpp"

#include <cmath>
#include <span>

namespace mueller {

struct TwoModeJonesVector {
  Vector4c c = Vector4c::Zero();

  cdouble operator()(int pol, int mode) const { return c(2 * pol + mode); }
};

struct TwoModeBCP {
  Matrix4c phi = Matrix4c::Zero();

  double trace() const { return phi.trace().real(); }
};

// Unnormalized, |C|^2 = 2.
inline TwoModeJonesVector bell_state() { return {Vector4c(1.0, 0.0, 0.0, 1.0)}; }

// C_{j,alpha} = p_j q_alpha.
inline TwoModeJonesVector product_state(const JonesVector& polarization, const Vector2c& spatial) {
  TwoModeJonesVector out;
  for (int j = 0; j < 2; ++j)
    for (int a = 0; a < 2; ++a) out.c(2 * j + a) = polarization.vec()(j) * spatial(a);
  return out;
}

/// 2 |C11 C22 - C12 C21| / |C|^2, in [0, 1]; zero exactly for product beams.
inline double concurrence(const TwoModeJonesVector& s) {
  const double n2 = s.c.squaredNorm();
  if (!(n2 > 0.0)) throw InvalidInput("concurrence of the zero vector");
  return 2.0 * std::abs(s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0)) / n2;
}

inline bool is_separable(const TwoModeJonesVector& s, double tol = kDefaultTol) {
  return concurrence(s) <= tol;
}

inline TwoModeBCP bcp_from_pure(const TwoModeJonesVector& s) { return {s.c * s.c.adjoint()}; }

struct TwoModeEnsembleMember {
  double weight = 1.0;
  TwoModeJonesVector state;
};

inline TwoModeBCP bcp_from_ensemble(std::span<const TwoModeEnsembleMember> members) {
  if (members.empty()) throw InvalidInput("empty ensemble");
  Matrix4c acc = Matrix4c::Zero();
  double total = 0.0;
  for (const auto& m : members) {
    if (!(m.weight >= 0.0)) throw InvalidInput("ensemble weights must be non-negative");
    acc += m.weight * (m.state.c * m.state.c.adjoint());
    total += m.weight;
  }
  if (!(total > 0.0)) throw InvalidInput("ensemble weights sum to zero");
  return {acc / total};
}

inline TwoModeBCP apply_h_to_bcp(const HMatrix& h, const TwoModeBCP& in) {
  TwoModeBCP out;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b) {
          cdouble acc{0.0};
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) acc += h.h(2 * i + k, 2 * j + l) * in.phi(2 * k + a, 2 * l + b);
          out.phi(2 * i + a, 2 * j + b) = acc;
        }
  return out;
}

inline TwoModeBCP apply_mueller_to_bcp(const MuellerMatrix& m, const TwoModeBCP& in) {
  return apply_h_to_bcp(h_from_mueller(m), in);
}

inline double min_bcp_eigenvalue(const TwoModeBCP& s) {
  const Matrix4c sym = 0.5 * (s.phi + s.phi.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix4c>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

struct WitnessResult {
  double min_eigenvalue = 0.0;
  TwoModeBCP output_state;
};

/// Sends the entangled beam through M and reports the smallest eigenvalue
/// of the output BCP matrix; negative means M cannot be physical.
inline WitnessResult witness_negativity(const MuellerMatrix& m) {
  const HMatrix h = h_from_mueller(m);
  WitnessResult r;
  r.output_state = apply_h_to_bcp(h, bcp_from_pure(bell_state()));
  r.min_eigenvalue = min_bcp_eigenvalue(r.output_state);
  if (std::abs(r.min_eigenvalue - min_h_eigenvalue(h)) > 1e-12 * (1.0 + h.h.norm()))
    throw InternalConsistency("witness output spectrum differs from the spectrum of H");
  return r;
}

}  // namespace mueller
