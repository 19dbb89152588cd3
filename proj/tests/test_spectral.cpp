#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sbp/error.hpp"
#include "sbp/operator.hpp"
#include "sbp/spectral.hpp"

namespace {

using sbp::Complex;
using sbp::EigenClass;

const double kInvSqrt5 = 1.0 / std::sqrt(5.0);

sbp::SpectralReport report_for(const sbp::Matrix& a, const sbp::Matrix& h) {
  const auto cls = sbp::classify_and_pair(sbp::eigen_decompose(a, h), 1e-10, a.norm());
  sbp::SpectralReport report;
  report.d_tilde = a;
  report.scale = a.norm();
  report.band = cls.band;
  report.pairs = cls.pairs;
  report.conjugate_pairs = cls.conjugate_pairs;
  report.m = cls.m;
  return report;
}

sbp::Matrix rotation(double omega) {
  sbp::Matrix r(2, 2);
  r << 0, omega, -omega, 0;
  return r;
}

TEST(Spectral, DTildeAddsBoundaryTerm) {
  const auto op = sbp::build_two_point();
  sbp::Matrix expected(2, 2);
  expected << 1, 1, -1, 1;
  EXPECT_LE((sbp::build_d_tilde(op) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spectral, CounterexampleEigenvalues) {
  const auto report = sbp::analyze_spectrum(sbp::build_counterexample(), 1e-10);
  ASSERT_EQ(report.pairs.size(), 6u);
  EXPECT_NEAR(report.scale, 2.2978, 1e-4);
  EXPECT_EQ(report.m, 1);
  EXPECT_EQ(report.zero_count, 0);
  ASSERT_EQ(report.imaginary.size(), 2u);
  for (std::size_t idx : report.imaginary) {
    EXPECT_NEAR(report.pairs[idx].lambda.real(), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(report.pairs[idx].lambda.imag()), kInvSqrt5, 1e-10);
  }
  // Remaining spectrum, frozen from an independent dense eigensolve.
  const Complex others[] = {{0.351682, -0.801055}, {0.351682, 0.801055}, {0.648318, -0.319855}, {0.648318, 0.319855}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(report.pairs[2 + k].lambda.real(), others[k].real(), 1e-6);
    EXPECT_NEAR(report.pairs[2 + k].lambda.imag(), others[k].imag(), 1e-6);
    EXPECT_EQ(report.pairs[2 + k].classification, EigenClass::positive_real_part);
  }
  EXPECT_NEAR(report.min_real_part(), 0.0, 1e-12);
}

TEST(Spectral, ReferenceEigenvectorIsAnEigenvector) {
  const auto op = sbp::build_counterexample();
  const sbp::CVector w = oracle::counterexample_w_plus();
  const sbp::CMatrix d = sbp::build_d_tilde(op).cast<Complex>();
  const sbp::CVector residual = d * w - Complex(0.0, kInvSqrt5) * w;
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(oracle::weighted_norm_squared(w, oracle::counterexample_h()), 40.0, 1e-12);
  EXPECT_NEAR(std::pow(sbp::h_norm(w, op.h), 2), 40.0, 1e-12);
}

TEST(Spectral, ComputedEigenvectorParallelToReference) {
  const auto report = sbp::analyze_spectrum(sbp::build_counterexample(), 1e-10);
  const sbp::CVector ref = oracle::counterexample_w_plus();
  for (std::size_t idx : report.imaginary) {
    const auto& p = report.pairs[idx];
    const sbp::CVector target = p.lambda.imag() > 0 ? ref : sbp::CVector(ref.conjugate());
    const double cosine = std::abs(target.dot(p.w)) / (target.norm() * p.w.norm());
    EXPECT_NEAR(cosine, 1.0, 1e-10);
    EXPECT_NEAR(p.w.norm(), 1.0, 1e-12);
  }
}

TEST(Spectral, BoundaryAndDissipationProbesVanish) {
  const auto op = sbp::build_counterexample();
  const auto report = sbp::analyze_spectrum(op, 1e-10);
  for (std::size_t k = 0; k < report.imaginary.size(); ++k) {
    const auto& p = report.pairs[report.imaginary[k]];
    const double scale = p.w.norm();
    EXPECT_LE(report.boundary_residuals[k].p0, 1e-10 * scale);
    EXPECT_LE(report.boundary_residuals[k].pn, 1e-10 * scale);
    EXPECT_LE(report.boundary_residuals[k].s, 1e-10 * scale);
    ASSERT_EQ(report.moment_residuals[k].size(), 2u);
    for (double r : report.moment_residuals[k]) EXPECT_LE(r, 1e-10 * p.h_norm);
    EXPECT_EQ(p.algebraic_multiplicity, 1);
    EXPECT_EQ(p.geometric_multiplicity, 1);
  }
  EXPECT_LE(report.orthogonality_defect, 1e-8);
  EXPECT_TRUE(report.imaginary_normal);
  EXPECT_TRUE(report.negative_real_violations.empty());
}

TEST(Spectral, ProbesRejectNonImaginaryPairs) {
  const auto op = sbp::build_counterexample();
  const auto report = sbp::analyze_spectrum(op, 1e-10);
  EXPECT_THROW(sbp::probe_boundary_residual(op, report.pairs.back()), sbp::Error);
  EXPECT_THROW(sbp::probe_moment_residuals(op, report.pairs.back()), sbp::Error);
}

TEST(Spectral, ConjugatePairingOfRotation) {
  const auto cls = sbp::classify_and_pair(sbp::eigen_decompose(rotation(2.0)), 1e-10, 2.0);
  ASSERT_EQ(cls.pairs.size(), 2u);
  EXPECT_EQ(cls.m, 1);
  ASSERT_EQ(cls.conjugate_pairs.size(), 1u);
  const auto [a, b] = cls.conjugate_pairs[0];
  EXPECT_NEAR(std::abs(cls.pairs[a].lambda - std::conj(cls.pairs[b].lambda)), 0.0, 1e-14);
  EXPECT_LE((cls.pairs[a].w - cls.pairs[b].w.conjugate()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Spectral, ZeroAndNegativeEigenvaluesCounted) {
  sbp::Matrix a = sbp::Matrix::Zero(3, 3);
  a(1, 1) = 1.0;
  a(2, 2) = -2.0;
  const auto cls = sbp::classify_and_pair(sbp::eigen_decompose(a), 1e-10, a.norm());
  EXPECT_EQ(cls.zero_count, 1);
  EXPECT_EQ(cls.m, 0);
  EXPECT_EQ(cls.negative_count, 1);
  EXPECT_EQ(cls.pairs.front().classification, EigenClass::negative_real_part);
}

TEST(Spectral, MultiplicitiesOfRepeatedEigenvalues) {
  const sbp::Matrix diag = sbp::Vector((sbp::Vector(3) << 1, 1, 2).finished()).asDiagonal();
  const auto d = sbp::eigen_decompose(diag);
  EXPECT_EQ(d[0].algebraic_multiplicity, 2);
  EXPECT_EQ(d[0].geometric_multiplicity, 2);
  EXPECT_LE(std::abs(d[0].w.dot(d[1].w)), 1e-12);

  sbp::Matrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  const auto j = sbp::eigen_decompose(jordan);
  EXPECT_EQ(j[0].algebraic_multiplicity, 2);
  EXPECT_EQ(j[0].geometric_multiplicity, 1);
}

TEST(Spectral, RepeatedImaginaryEigenspaceIsOrthonormalized) {
  sbp::Matrix a = sbp::Matrix::Zero(4, 4);
  a.block(0, 0, 2, 2) = rotation(1.0);
  a.block(2, 2, 2, 2) = rotation(1.0);
  const sbp::Matrix h = sbp::Vector((sbp::Vector(4) << 1, 1, 2, 2).finished()).asDiagonal();
  // Similarity keeps the rotation skew-adjoint in the H inner product.
  const sbp::Matrix hs = h.cwiseSqrt();
  const sbp::Matrix a_h = hs.inverse() * a * hs;
  const auto report = report_for(a_h, h);
  EXPECT_EQ(report.m, 2);
  const auto modes = sbp::orthogonalize_imaginary(report, h);
  ASSERT_EQ(modes.size(), 4u);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    EXPECT_NEAR(sbp::h_norm(modes[i].w, h), 1.0, 1e-12);
    const sbp::CVector residual = a_h.cast<Complex>() * modes[i].w - modes[i].lambda * modes[i].w;
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t k = i + 1; k < modes.size(); ++k) EXPECT_LE(std::abs(sbp::h_inner(modes[i].w, modes[k].w, h)), 1e-12);
  }
  for (std::size_t i = 0; i < modes.size(); i += 2)
    EXPECT_LE((modes[i].w - modes[i + 1].w.conjugate()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Spectral, OrthogonalizeNeedsImaginaryPairs) {
  const auto op = sbp::build_two_point();
  EXPECT_THROW(sbp::orthogonalize_imaginary(sbp::analyze_spectrum(op, 1e-10), op.h), sbp::Error);
}

TEST(Spectral, DecompositionIsDeterministic) {
  const auto a = sbp::analyze_spectrum(sbp::build_counterexample(), 1e-10);
  const auto b = sbp::analyze_spectrum(sbp::build_counterexample(), 1e-10);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_EQ(a.pairs[i].lambda, b.pairs[i].lambda);
    EXPECT_TRUE(a.pairs[i].w == b.pairs[i].w);
  }
}

TEST(Spectral, RejectsNonSquareInput) {
  EXPECT_THROW(sbp::eigen_decompose(sbp::Matrix::Zero(2, 3)), sbp::Error);
}

}  // namespace
