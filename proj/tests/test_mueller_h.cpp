#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>

namespace mueller {
namespace {

using testing::max_abs_diff;
using testing::Rng;

Matrix4c literal_h(std::initializer_list<double> vals, double scale) {
  Matrix4c h;
  auto it = vals.begin();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) h(r, c) = scale * *it++;
  return h;
}

// The closed-form reindexing must reproduce the four element swaps that
// relate H and B; every other entry stays in place.
TEST(Reshuffle, MatchesExplicitSwapList) {
  Rng rng(3);
  Matrix4c x;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) x(r, c) = testing::cgauss(rng);

  Matrix4c swapped = x;
  const std::pair<std::pair<int, int>, std::pair<int, int>> swaps[] = {
      {{0, 2}, {1, 0}}, {{0, 3}, {1, 1}}, {{2, 2}, {3, 0}}, {{2, 3}, {3, 1}}};
  for (const auto& [a, b] : swaps) std::swap(swapped(a.first, a.second), swapped(b.first, b.second));

  EXPECT_EQ(reshuffle(x), swapped);
  EXPECT_EQ(reshuffle(reshuffle(x)), x);
}

TEST(HFromMueller, IdentityIsRankOneProjector) {
  const Matrix4c h = h_from_mueller(MuellerMatrix::identity()).h;
  const Vector4c jt(1, 0, 0, 1);
  EXPECT_LT(max_abs_diff(h, Matrix4c(jt * jt.adjoint())), 1e-15);
}

TEST(HFromMueller, DiagonalFamilyMatchesClosedForm) {
  const double ds[][3] = {{0.3, -0.2, 0.7}, {1, 1, 1}, {0, 0, 0}, {-0.9, 0.4, 0.1}, {2, -3, 0.5}};
  for (const auto& d : ds) {
    const double d1 = d[0], d2 = d[1], d3 = d[2];
    const Matrix4c expected = literal_h({1 + d1, 0, 0, d2 + d3,
                                         0, 1 - d1, d2 - d3, 0,
                                         0, d2 - d3, 1 - d1, 0,
                                         d2 + d3, 0, 0, 1 + d1}, 0.5);
    EXPECT_LT(max_abs_diff(h_from_mueller(MuellerMatrix::diagonal(d1, d2, d3)).h, expected), 1e-15);
  }
}

TEST(HFromMueller, ReflectionInS3) {
  const HMatrix h = h_from_mueller(MuellerMatrix::diagonal(1, 1, -1));
  const Matrix4c expected = literal_h({2, 0, 0, 0, 0, 0, 2, 0, 0, 2, 0, 0, 0, 0, 0, 2}, 0.5);
  EXPECT_LT(max_abs_diff(h.h, expected), 1e-15);
  const auto sp = h_spectrum(h);
  EXPECT_NEAR(sp.values(0), -1.0, 1e-14);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(sp.values(k), 1.0, 1e-14);
}

TEST(HFromMueller, AgreesWithDefiningActionOracle) {
  Rng rng(5);
  for (int n = 0; n < 1000; ++n) {
    const MuellerMatrix m = testing::random_real4(rng);
    ASSERT_LT(max_abs_diff(h_from_mueller(m).h, testing::h_by_action(m.m)), 1e-12);
  }
}

TEST(HFromMueller, IsHermitianAndLinear) {
  Rng rng(6);
  for (int n = 0; n < 200; ++n) {
    const MuellerMatrix m1 = testing::random_real4(rng), m2 = testing::random_real4(rng);
    const double a = testing::gauss(rng), b = testing::gauss(rng);
    const Matrix4c h1 = h_from_mueller(m1).h, h2 = h_from_mueller(m2).h;
    EXPECT_LT(detail::hermitian_residual(h1), 1e-14);
    const Matrix4c lhs = h_from_mueller({a * m1.m + b * m2.m}).h;
    ASSERT_LT(max_abs_diff(lhs, Matrix4c(a * h1 + b * h2)), 1e-12);
  }
}

TEST(MuellerFromH, Examples) {
  const MuellerMatrix dep = mueller_from_h({0.5 * Matrix4c::Identity()});
  EXPECT_LT(max_abs_diff(dep.m, MuellerMatrix::diagonal(0, 0, 0).m), 1e-15);

  const Vector4c jt(1, 0, 0, 1);
  EXPECT_LT(max_abs_diff(mueller_from_h({jt * jt.adjoint()}).m, Matrix4r::Identity()), 1e-15);
}

TEST(MuellerFromH, RoundTripOnRandomReal) {
  Rng rng(8);
  for (int n = 0; n < 1000; ++n) {
    const MuellerMatrix m = testing::random_real4(rng);
    ASSERT_LT(max_abs_diff(mueller_from_h(h_from_mueller(m)).m, m.m), 1e-12);
  }
}

TEST(MuellerFromH, RejectsNonHermitian) {
  Matrix4c h = Matrix4c::Identity();
  h(0, 1) = 1.0;
  EXPECT_THROW(mueller_from_h({h}), InvalidInput);
}

TEST(MuellerJonesFromJones, Examples) {
  EXPECT_LT(max_abs_diff(mueller_jones_from_jones(JonesMatrix::identity()).m, Matrix4r::Identity()), 1e-15);

  JonesMatrix pol;
  pol.j << 1, 0, 0, 0;
  Matrix4r xpol = Matrix4r::Zero();
  xpol.topLeftCorner<2, 2>().setConstant(0.5);
  EXPECT_LT(max_abs_diff(mueller_jones_from_jones(pol).m, xpol), 1e-15);

  // Quarter-wave retarder with fast axis along x.
  const double delta = std::numbers::pi / 2;
  JonesMatrix qwp;
  qwp.j << std::polar(1.0, delta / 2), 0, 0, std::polar(1.0, -delta / 2);
  Matrix4r rot = Matrix4r::Identity();
  rot.bottomRightCorner<2, 2>() << 0, 1, -1, 0;
  EXPECT_LT(max_abs_diff(mueller_jones_from_jones(qwp).m, rot), 1e-15);
}

TEST(MuellerJonesFromJones, AgreesWithTraceFormula) {
  Rng rng(9);
  for (int n = 0; n < 500; ++n) {
    const JonesMatrix j = testing::random_jones(rng);
    ASSERT_LT(max_abs_diff(mueller_jones_from_jones(j).m, testing::mueller_by_trace(j.j)), 1e-12);
  }
}

TEST(MuellerJonesFromJones, StokesConsistency) {
  Rng rng(10);
  for (int n = 0; n < 1000; ++n) {
    const JonesMatrix j = testing::random_jones(rng);
    const StokesVector s = testing::random_stokes(rng);
    const StokesVector lhs = apply_mueller(mueller_jones_from_jones(j), s);
    const StokesVector rhs = stokes_from_coherency(jones_apply(j, coherency_from_stokes(s)));
    ASSERT_LT(max_abs_diff(lhs.s, rhs.s), 1e-10);
  }
}

TEST(MuellerJonesFromJones, HIsRankOneWithFrobeniusTrace) {
  Rng rng(12);
  for (int n = 0; n < 500; ++n) {
    const JonesMatrix j = testing::random_jones(rng);
    const HMatrix h = h_from_mueller(mueller_jones_from_jones(j));
    const auto sp = h_spectrum(h);
    const double fro2 = j.j.squaredNorm();
    EXPECT_NEAR(h.trace(), fro2, 1e-10 * fro2);
    EXPECT_NEAR(sp.values(3), fro2, 1e-10 * fro2);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(sp.values(k), 0.0, 1e-10 * fro2);
    const Vector4c jt = vec_from_jones(j);
    ASSERT_LT(max_abs_diff(h.h, Matrix4c(jt * jt.adjoint())), 1e-10 * fro2);
  }
}

TEST(ApplyMueller, Examples) {
  const StokesVector x(1, 1, 0, 0);
  EXPECT_EQ(apply_mueller(MuellerMatrix::identity(), x).s, x.s);
  EXPECT_EQ(apply_mueller(MuellerMatrix::diagonal(0, 0, 0), x).s, Vector4r(1, 0, 0, 0));
  JonesMatrix pol;
  pol.j << 1, 0, 0, 0;
  const StokesVector out = apply_mueller(mueller_jones_from_jones(pol), StokesVector(1, 0, 0, 0));
  EXPECT_LT(max_abs_diff(out.s, Vector4r(0.5, 0.5, 0, 0)), 1e-15);
}

TEST(IsMuellerJones, Examples) {
  const auto id = is_mueller_jones(MuellerMatrix::identity());
  ASSERT_TRUE(id.has_value());
  EXPECT_LT(max_abs_diff(id->j, Matrix2c::Identity()), 1e-14);

  EXPECT_FALSE(is_mueller_jones(MuellerMatrix::diagonal(0, 0, 0)).has_value());
  EXPECT_FALSE(is_mueller_jones(MuellerMatrix::diagonal(1, 1, -1)).has_value());
  EXPECT_FALSE(is_mueller_jones({Matrix4r::Zero()}).has_value());
}

TEST(IsMuellerJones, RecoversJonesUpToGlobalPhase) {
  Rng rng(14);
  for (int n = 0; n < 1000; ++n) {
    const JonesMatrix j = testing::random_jones(rng);
    const auto rec = is_mueller_jones(mueller_jones_from_jones(j));
    ASSERT_TRUE(rec.has_value());
    const Matrix2c a = rec->j * rec->j.adjoint(), b = j.j * j.j.adjoint();
    ASSERT_LT((a - b).norm(), 1e-10);
    // Phase convention: largest-magnitude component real and positive.
    const Vector4c v = vec_from_jones(*rec);
    int idx;
    v.cwiseAbs().maxCoeff(&idx);
    EXPECT_EQ(v(idx).imag(), 0.0);
    EXPECT_GT(v(idx).real(), 0.0);
  }
}

TEST(DecomposeConvex, DepolarizerSplitsIntoFourEqualTerms) {
  const MuellerMatrix m = MuellerMatrix::diagonal(0, 0, 0);
  const auto dec = decompose_convex(m);
  ASSERT_EQ(dec.terms.size(), 4u);
  for (const auto& t : dec.terms) {
    EXPECT_NEAR(t.weight, 0.5, 1e-14);
    EXPECT_NEAR(t.jones.j.norm(), 1.0, 1e-14);
  }
  EXPECT_LT(dec.residual(m), 1e-10);
}

TEST(DecomposeConvex, IdentityIsSingleTerm) {
  const auto dec = decompose_convex(MuellerMatrix::identity());
  ASSERT_EQ(dec.terms.size(), 1u);
  EXPECT_NEAR(dec.terms[0].weight, 2.0, 1e-14);
  EXPECT_LT(max_abs_diff(dec.terms[0].jones.j, Matrix2c(Matrix2c::Identity() / std::sqrt(2.0))), 1e-14);
}

TEST(DecomposeConvex, RefusesGreyRegionWithMinEigenvalue) {
  try {
    (void)decompose_convex(MuellerMatrix::diagonal(1, 1, -1));
    FAIL() << "expected NotPhysical";
  } catch (const NotPhysical& e) {
    EXPECT_NEAR(e.min_eigenvalue(), -1.0, 1e-12);
  }
}

TEST(DecomposeConvex, ZeroMatrixHasNoTerms) {
  EXPECT_THROW(decompose_convex({Matrix4r::Zero()}), InvalidInput);
}

TEST(DecomposeConvex, ReconstructsRandomConvexSums) {
  Rng rng(15);
  for (int n = 0; n < 1000; ++n) {
    const int count = 1 + n % 4;
    Matrix4r m = Matrix4r::Zero();
    for (int k = 0; k < count; ++k)
      m += testing::uniform(rng, 0.05, 1.0) * mueller_jones_from_jones(testing::random_jones(rng)).m;
    const auto dec = decompose_convex({m});
    ASSERT_GE(dec.terms.size(), 1u);
    ASSERT_LE(dec.terms.size(), static_cast<size_t>(count));
    for (size_t k = 1; k < dec.terms.size(); ++k) EXPECT_GE(dec.terms[k - 1].weight, dec.terms[k].weight);
    ASSERT_LT(dec.residual({m}), 1e-10);
  }
}

}  // namespace
}  // namespace mueller
