#pragma once

#include "sbp/operator.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace sbp {

enum class Property {
  A_dplus,
  A_dminus,
  A_p0,
  A_pn,
  B_spd,
  C_identity,
  D_identity,
  S_symmetry,
  S_psd,
  S_annihilation,
};

std::string_view to_string(Property p);

struct PropertyResidual {
  Property property;
  double residual = 0.0;  // max-norm of the defect
  bool passed = false;
};

/// Per-degree accuracy defects for the monomial x^j.
struct AccuracyRow {
  int j = 0;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double p0 = 0.0;
  double pn = 0.0;
  bool passed = false;
};

struct AccuracyCheck {
  std::vector<AccuracyRow> rows;
  /// Largest j with every row 0..j passing; -1 when j = 0 already fails.
  int observed_order = -1;

  /// The four accuracy residuals as worst case over rows 0..j_limit.
  std::array<PropertyResidual, 4> summarize(int j_limit, double tol) const;
};

AccuracyCheck check_accuracy(const SbpOperatorPair& op, int j_max, double tol = kDefaultTolerance);

/// Residual is max(|H - H^T|_max, max(0, -lambda_min)); passes when H is
/// symmetric to `tol` and lambda_min of the symmetric part exceeds tol * |H|_max.
PropertyResidual check_spd(const Matrix& h, double tol = kDefaultTolerance);

/// Residuals of the two boundary identities (with and without S).
std::array<PropertyResidual, 2> check_sbp_identities(const SbpOperatorPair& op, double tol = kDefaultTolerance);

/// Symmetry, positive semi-definiteness and annihilation of x^0..x^q by S.
std::array<PropertyResidual, 3> check_s_conditions(const SbpOperatorPair& op, double tol = kDefaultTolerance);

struct NullspaceDiagnostics {
  bool consistent = false;
  double sigma_min_d_tilde = 0.0;
  double sigma_max_d_tilde = 0.0;
  double ones_residual = 0.0;  // max |D+ 1|
  Index rank_d_plus = 0;
  double rank_threshold = 0.0;
};

/// Decides ker D+ = span{1} twice: through the invertibility of the
/// SAT-augmented matrix and directly from D+ 1 and rank(D+). Throws an
/// internal-inconsistency error when the two routes disagree.
NullspaceDiagnostics check_nullspace_consistency(const SbpOperatorPair& op, double tol = kDefaultTolerance);

struct EigenvalueVerdict {
  bool holds = false;
  double min_real_part = 0.0;
  double band = 0.0;  // tol * |D~+|_F
  std::vector<Complex> offending;
};

EigenvalueVerdict check_eigenvalue_property(const SbpOperatorPair& op, double tol = kDefaultTolerance);

struct VerificationReport {
  std::vector<PropertyResidual> residuals;
  int observed_order = -1;
  bool nullspace_consistent = false;
  bool eigenvalue_property = false;
  double tolerance = kDefaultTolerance;
  double min_real_part = 0.0;
  std::vector<Complex> offending_eigenvalues;
  NullspaceDiagnostics nullspace;
  std::vector<std::string> notes;

  /// Every residual check passed.
  bool all_residuals_passed() const;
  const PropertyResidual& find(Property p) const;
};

VerificationReport verify_all(const SbpOperatorPair& op, double tol = kDefaultTolerance);

}  // namespace sbp
