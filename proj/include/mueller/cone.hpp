/**
 * @file cone.hpp
 * @brief Membership of a real 4x4 matrix in the set of maps that send the
 * Stokes cone into itself ("pre-Mueller"), in the physical subset
 * (H >= 0), and the closed-form diagonal family diag(1, d1, d2, d3).
 *
 * By linearity it suffices to look at the image of unit pure states
 * s(u) = (1, u), |u| = 1. The Lorentz quadratic q(u) = (Ms)^T G (Ms)
 * is minimized numerically over the sphere: a (theta, phi) grid picks
 * candidate basins and a projected gradient descent on the sphere
 * refines each one. The output intensity (Ms)_0 = m00 + m0r . u is
 * minimized in closed form.
 */

#pragma once

#include "mueller/common.hpp"
#include "mueller/mueller_h.hpp"
#include "mueller/polarization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace mueller {

struct ConeScanConfig {
  int theta_steps = 181;
  int phi_steps = 361;
  double tol = kDefaultTol;
  double step_tol = 1e-8;  // refinement stops once the sphere step is below this
  int max_candidates = 8;
  int max_iterations = 20000;

  // Square-ish grid from a single resolution figure, n x (2n - 1).
  static ConeScanConfig with_grid(int n) {
    ConeScanConfig c;
    c.theta_steps = n;
    c.phi_steps = 2 * n - 1;
    return c;
  }
};

struct PreMuellerResult {
  bool pre_mueller = false;
  double cone_min_value = 0.0;
  StokesVector cone_argmin;  // unit pure state
  double min_intensity = 0.0;
};

namespace detail {

struct SphereQuadratic {
  double c;             // q at the origin of u
  Eigen::Vector3d b;    // linear part / 2
  Eigen::Matrix3d q;    // quadratic part

  explicit SphereQuadratic(const Matrix4r& m) {
    const Matrix4r w = m.transpose() * minkowski_metric() * m;
    c = w(0, 0);
    b = w.block<3, 1>(1, 0);
    q = w.block<3, 3>(1, 1);
  }

  double value(const Eigen::Vector3d& u) const { return c + 2.0 * b.dot(u) + u.dot(q * u); }
  Eigen::Vector3d gradient(const Eigen::Vector3d& u) const { return 2.0 * (b + q * u); }
};

inline Eigen::Vector3d sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Armijo-backtracked Riemannian gradient descent with a normalize retraction.
inline Eigen::Vector3d refine_on_sphere(const SphereQuadratic& f, Eigen::Vector3d u,
                                        const ConeScanConfig& cfg) {
  const double lipschitz = 2.0 * (f.q.norm() + f.b.norm()) + 1e-300;
  double step = 1.0 / lipschitz;
  double fu = f.value(u);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Eigen::Vector3d g = f.gradient(u);
    const Eigen::Vector3d rg = g - g.dot(u) * u;
    const double rg2 = rg.squaredNorm();
    if (rg2 == 0.0) break;

    Eigen::Vector3d next;
    double fnext = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      next = (u - step * rg).normalized();
      fnext = f.value(next);
      if (fnext <= fu - 0.25 * step * rg2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double moved = (next - u).norm();
    u = next;
    fu = fnext;
    step *= 2.0;
    if (moved < cfg.step_tol) break;
  }
  return u;
}

}  // namespace detail

inline PreMuellerResult is_pre_mueller(const MuellerMatrix& mm, const ConeScanConfig& cfg = {}) {
  if (cfg.theta_steps < 2 || cfg.phi_steps < 2) throw InvalidInput("cone scan grid must be at least 2x2");
  const Matrix4r& m = mm.m;
  const detail::SphereQuadratic f(m);

  const int nt = cfg.theta_steps;
  const int np = cfg.phi_steps;
  const double dtheta = std::numbers::pi / (nt - 1);
  const double dphi = 2.0 * std::numbers::pi / (np - 1);

  std::vector<double> grid(static_cast<size_t>(nt) * np);
  auto at = [&](int i, int j) -> double& { return grid[static_cast<size_t>(i) * np + j]; };
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) at(i, j) = f.value(detail::sphere_point(i * dtheta, j * dphi));

  // Grid-local minima over the 8-neighbourhood (phi wraps; the last phi
  // column duplicates the first).
  struct Cell {
    double v;
    int i, j;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np - 1; ++j) {
      const double v = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        const int ii = i + di;
        if (ii < 0 || ii >= nt) continue;
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int jj = (j + dj + (np - 1)) % (np - 1);
          if (at(ii, jj) < v) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) cells.push_back({v, i, j});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.v < b.v; });

  Eigen::Vector3d best_u = Eigen::Vector3d::UnitZ();
  double best = f.value(best_u);
  std::vector<Eigen::Vector3d> seeds;
  for (const auto& c : cells) {
    if (static_cast<int>(seeds.size()) >= cfg.max_candidates) break;
    const Eigen::Vector3d u = detail::sphere_point(c.i * dtheta, c.j * dphi);
    // Plateaus (e.g. a pole row) produce many equal neighbours; one seed each.
    const bool duplicate = std::any_of(seeds.begin(), seeds.end(), [&](const Eigen::Vector3d& s) {
      return (s - u).norm() < 2.5 * std::max(dtheta, dphi);
    });
    if (duplicate) continue;
    seeds.push_back(u);
  }
  for (const auto& s : seeds) {
    const Eigen::Vector3d u = detail::refine_on_sphere(f, s, cfg);
    const double v = f.value(u);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }

  PreMuellerResult r;
  r.cone_min_value = best;
  r.cone_argmin = StokesVector(1.0, best_u(0), best_u(1), best_u(2));

  const Eigen::Vector3d m0r = m.block<1, 3>(0, 1).transpose();
  const double scale = m.norm();
  r.min_intensity = m(0, 0) - m0r.norm();

  bool intensity_ok = r.min_intensity > cfg.tol * scale;
  if (!intensity_ok && std::abs(r.min_intensity) <= cfg.tol * scale) {
    // A vanishing output intensity is only acceptable when the whole
    // image is the zero vector (total absorption of that ray).
    if (m0r.norm() > 0.0) {
      const Eigen::Vector3d u = -m0r.normalized();
      const Vector4r out = m * Vector4r(1.0, u(0), u(1), u(2));
      intensity_ok = out.norm() <= cfg.tol * scale;
    } else {
      intensity_ok = scale == 0.0;
    }
  }
  r.pre_mueller = intensity_ok && best >= -cfg.tol * scale * scale;
  return r;
}

enum class MuellerKind { NonPreMueller, PreMuellerOnly, PhysicalMueller };

inline const char* to_string(MuellerKind k) {
  switch (k) {
    case MuellerKind::NonPreMueller: return "NonPreMueller";
    case MuellerKind::PreMuellerOnly: return "PreMuellerOnly";
    case MuellerKind::PhysicalMueller: return "PhysicalMueller";
  }
  return "?";
}

struct ClassificationResult {
  MuellerKind kind = MuellerKind::NonPreMueller;
  bool is_mueller_jones = false;
  double min_h_eigenvalue = 0.0;
  double h_trace = 0.0;
  double cone_min_value = 0.0;
  StokesVector cone_argmin;
  double min_intensity = 0.0;
};

inline ClassificationResult classify(const MuellerMatrix& m, const ConeScanConfig& cfg = {}) {
  const HMatrix h = h_from_mueller(m);
  const double tr = h.trace();
  const double lmin = min_h_eigenvalue(h);
  const bool physical = tr >= 0.0 && lmin >= -cfg.tol * tr;
  const PreMuellerResult pm = is_pre_mueller(m, cfg);

  // Every positive sum of Jones systems maps the cone into itself. The
  // two tests use different tolerance scales, so allow some slack before
  // calling it a contradiction.
  if (physical && !pm.pre_mueller) {
    const double scale = m.m.squaredNorm();
    if (pm.cone_min_value < -1e3 * cfg.tol * scale - 1e-12 ||
        pm.min_intensity < -1e3 * cfg.tol * std::sqrt(scale) - 1e-12)
      throw InternalConsistency("H is PSD but the matrix does not preserve the Stokes cone");
  }

  ClassificationResult r;
  r.kind = physical ? MuellerKind::PhysicalMueller
                    : (pm.pre_mueller ? MuellerKind::PreMuellerOnly : MuellerKind::NonPreMueller);
  r.is_mueller_jones = physical && is_mueller_jones(m, cfg.tol).has_value();
  r.min_h_eigenvalue = lmin;
  r.h_trace = tr;
  r.cone_min_value = pm.cone_min_value;
  r.cone_argmin = pm.cone_argmin;
  r.min_intensity = pm.min_intensity;
  return r;
}

// ---- diagonal family diag(1, d1, d2, d3) ----

struct DiagonalParams {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;

  MuellerMatrix mueller() const { return MuellerMatrix::diagonal(d1, d2, d3); }
};

enum class DiagonalRegion { OutsideCube, CubeOnly, Tetrahedron };

inline const char* to_string(DiagonalRegion r) {
  switch (r) {
    case DiagonalRegion::OutsideCube: return "outside";
    case DiagonalRegion::CubeOnly: return "cube_only";
    case DiagonalRegion::Tetrahedron: return "tetrahedron";
  }
  return "?";
}

// Boundary points within tol go to the more physical region.
inline DiagonalRegion diagonal_region(const DiagonalParams& p, double tol = kDefaultTol) {
  const double bound = 1.0 + tol;
  if (std::max({std::abs(p.d1), std::abs(p.d2), std::abs(p.d3)}) > bound)
    return DiagonalRegion::OutsideCube;
  const std::array<double, 4> faces{-p.d1 - p.d2 - p.d3, -p.d1 + p.d2 + p.d3, p.d1 + p.d2 - p.d3,
                                    p.d1 - p.d2 + p.d3};
  for (double f : faces)
    if (f > bound) return DiagonalRegion::CubeOnly;
  return DiagonalRegion::Tetrahedron;
}

inline HMatrix h_diagonal(const DiagonalParams& p) {
  const double a = 1.0 + p.d1, b = 1.0 - p.d1, c = p.d2 + p.d3, d = p.d2 - p.d3;
  Matrix4r h;
  h << a, 0, 0, c,
       0, b, d, 0,
       0, d, b, 0,
       c, 0, 0, a;
  return {(0.5 * h).cast<cdouble>()};
}

struct DiagonalScanPoint {
  DiagonalParams d;
  DiagonalRegion region;
};

/// Uniform resolution^3 grid over [-extent, extent]^3, d1 slowest.
inline std::vector<DiagonalScanPoint> diag_region_scan(int resolution, double extent = 1.1,
                                                       double tol = kDefaultTol) {
  if (resolution < 2) throw InvalidInput("scan resolution must be at least 2");
  if (!(extent > 0.0)) throw InvalidInput("scan extent must be positive");
  std::vector<DiagonalScanPoint> out;
  out.reserve(static_cast<size_t>(resolution) * resolution * resolution);
  auto coord = [&](int k) { return -extent + 2.0 * extent * k / (resolution - 1); };
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b)
      for (int c = 0; c < resolution; ++c) {
        const DiagonalParams d{coord(a), coord(b), coord(c)};
        out.push_back({d, diagonal_region(d, tol)});
      }
  return out;
}

}  // namespace mueller
