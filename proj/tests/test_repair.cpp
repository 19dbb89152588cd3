#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "sbp/error.hpp"
#include "sbp/linalg.hpp"
#include "sbp/operator.hpp"
#include "sbp/repair.hpp"
#include "sbp/spectral.hpp"
#include "sbp/verify.hpp"

namespace {

using sbp::ErrorCode;

TEST(Repair, ShiftsImaginaryPairWithinBudget) {
  const auto op = sbp::build_counterexample();
  const auto before = sbp::analyze_spectrum(op, 1e-10);
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const auto result = sbp::repair_operator(op, eps);
    const double change = (result.op.d_plus - op.d_plus).norm();
    EXPECT_LE(change, eps * (1 + 1e-14)) << eps;
    EXPECT_GT(change, 0.5 * eps) << eps;
    EXPECT_TRUE(result.plan.shift_resolved);
    ASSERT_EQ(result.plan.epsilons.size(), 1u);
    EXPECT_NEAR(result.plan.predicted_shifts[0], result.plan.epsilons[0] / 2, 1e-18);

    const auto after = sbp::analyze_spectrum(result.op, 1e-10);
    EXPECT_EQ(after.m, 0);
    for (std::size_t i = 0; i < after.pairs.size(); ++i) {
      if (i < 2) {
        EXPECT_NEAR(after.pairs[i].lambda.real(), result.plan.predicted_shifts[0], 1e-8);
        EXPECT_NEAR(after.pairs[i].lambda.imag(), before.pairs[i].lambda.imag(), 1e-8);
      } else {
        EXPECT_LE(std::abs(after.pairs[i].lambda - before.pairs[i].lambda), 1e-8 * before.scale);
      }
    }
    EXPECT_TRUE(sbp::verify_all(result.op).eigenvalue_property) << eps;
  }
}

TEST(Repair, UpdatedDissipationIsAdmissible) {
  const auto result = sbp::repair_operator(sbp::build_counterexample(), 1e-3);
  const sbp::Matrix& s = result.op.s;
  EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GE(sbp::min_symmetric_eigenvalue(s), -1e-15);
  EXPECT_EQ(sbp::numerical_rank(result.plan.s_prime), 2);
  for (const auto& r : sbp::check_s_conditions(result.op)) EXPECT_TRUE(r.passed) << sbp::to_string(r.property);
  for (const auto& r : sbp::check_sbp_identities(result.op)) EXPECT_TRUE(r.passed) << sbp::to_string(r.property);
  const auto acc = sbp::check_accuracy(result.op, 1);
  for (const auto& row : acc.rows) {
    EXPECT_LT(row.d_plus, 1e-10);
    EXPECT_LT(row.d_minus, 1e-10);
  }
  EXPECT_EQ(result.op.name, "counterexample+repaired");
}

TEST(Repair, SpectralNormBudget) {
  const auto op = sbp::build_counterexample();
  const auto result = sbp::repair_operator(op, 1e-4, sbp::NormChoice::spectral);
  EXPECT_LE(sbp::spectral_norm(result.op.d_plus - op.d_plus), 1e-4 * (1 + 1e-14));
  EXPECT_EQ(result.plan.norm_choice, sbp::NormChoice::spectral);
  // Rank two update with equal singular values: spectral norm is Frobenius / sqrt 2.
  EXPECT_NEAR(sbp::matrix_norm(result.plan.s_prime, sbp::NormChoice::frobenius) /
                  sbp::matrix_norm(result.plan.s_prime, sbp::NormChoice::spectral),
              std::sqrt(2.0), 1e-10);
}

TEST(Repair, OperatorWithPropertyIsUnchanged) {
  const auto op = sbp::build_classical_fd(8, sbp::Interval(0, 1));
  const auto result = sbp::repair_operator(op, 1e-6);
  EXPECT_TRUE(result.op.d_plus == op.d_plus);
  EXPECT_TRUE(result.op.s == op.s);
  EXPECT_TRUE(result.plan.modes.empty());
  EXPECT_EQ(result.plan.norm_bound, 0.0);
}

TEST(Repair, RepairIsIdempotent) {
  const auto once = sbp::repair_operator(sbp::build_counterexample(), 1e-2);
  const auto twice = sbp::repair_operator(once.op, 1e-2);
  EXPECT_TRUE(twice.plan.modes.empty());
  EXPECT_TRUE(twice.op.d_plus == once.op.d_plus);
}

TEST(Repair, KernelDefectCannotBeRepaired) {
  auto op = sbp::build_counterexample();
  op.d_plus.row(2).setZero();
  op.d_plus.row(3).setZero();
  op.d_minus = op.d_plus;
  try {
    sbp::repair_operator(op, 1e-6);
    FAIL();
  } catch (const sbp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::repair_impossible);
  }
}

TEST(Repair, RejectsNonPositiveBudget) {
  EXPECT_THROW(sbp::repair_operator(sbp::build_counterexample(), 0.0), sbp::Error);
  EXPECT_THROW(sbp::repair_operator(sbp::build_counterexample(), -1.0), sbp::Error);
}

TEST(Repair, SPrimeRequiresConjugateOrthonormalModes) {
  const auto op = sbp::build_counterexample();
  auto modes = sbp::orthogonalize_imaginary(sbp::analyze_spectrum(op, 1e-10), op.h);
  ASSERT_EQ(modes.size(), 2u);
  const sbp::Matrix s = sbp::build_s_prime(op.h, modes, {1.0});
  EXPECT_LE(sbp::max_abs(sbp::Vector(s * sbp::Vector::Ones(6))), 1e-14);
  EXPECT_LE(std::abs(s(0, 0)) + std::abs(s(5, 5)), 1e-14);

  auto scaled = modes;
  scaled[0].w *= 2.0;
  scaled[1].w *= 2.0;
  EXPECT_THROW(sbp::build_s_prime(op.h, scaled, {1.0}), sbp::Error);
  auto unpaired = modes;
  unpaired[1].w = unpaired[0].w;
  EXPECT_THROW(sbp::build_s_prime(op.h, unpaired, {1.0}), sbp::Error);
  EXPECT_THROW(sbp::build_s_prime(op.h, modes, {1.0, 2.0}), sbp::Error);
}

TEST(Repair, PredictedShiftFormula) {
  sbp::HEigenPair pair;
  pair.h_norm = std::sqrt(40.0);
  pair.classification = sbp::EigenClass::imaginary;
  EXPECT_DOUBLE_EQ(sbp::predicted_shift(pair, 1e-3), 0.02);
}

TEST(Repair, PredictedShiftNeedsImaginaryPair) {
  sbp::HEigenPair pair;
  EXPECT_THROW(sbp::predicted_shift(pair, 1e-3), sbp::Error);
}

TEST(Repair, NormChoiceParsing) {
  EXPECT_EQ(sbp::parse_norm_choice("frobenius"), sbp::NormChoice::frobenius);
  EXPECT_EQ(sbp::parse_norm_choice("spectral"), sbp::NormChoice::spectral);
  EXPECT_FALSE(sbp::parse_norm_choice("max").has_value());
}

}  // namespace
