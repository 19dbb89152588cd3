#pragma once

#include "sbp/operator.hpp"
#include "sbp/spectral.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sbp {

enum class NormChoice { frobenius, spectral };

std::string_view to_string(NormChoice choice);
std::optional<NormChoice> parse_norm_choice(std::string_view text);

double matrix_norm(const Matrix& m, NormChoice choice);

/// Dissipation S' that pushes the imaginary eigenvalues of D~+ into the
/// right half-plane while leaving every other eigenpair in place.
struct PerturbationPlan {
  std::vector<ImaginaryMode> modes;  // H-orthonormal, conjugates interleaved
  std::vector<double> epsilons;      // one per conjugate pair
  std::vector<double> predicted_shifts;  // eps_k / 2 * |w_k|_H^2
  Matrix s_prime;
  double norm_bound = 0.0;  // achieved |D+' - D+| in `norm_choice`
  NormChoice norm_choice = NormChoice::frobenius;
  /// Smallest predicted shift exceeds the tolerance band used to classify
  /// the original spectrum; false means a verifier at that tolerance will
  /// still see the shifted eigenvalues as imaginary.
  bool shift_resolved = true;

  bool empty() const noexcept { return modes.empty(); }
};

/// sum_k eps_k [(H w_k)(H w_k)^* + (H conj w_k)(H conj w_k)^*]. `modes` must
/// hold H-orthonormal conjugate pairs (checked to 1e-8); every eps_k > 0.
/// Returns the zero matrix for an empty mode list.
Matrix build_s_prime(const Matrix& h, const std::vector<ImaginaryMode>& modes, const std::vector<double>& epsilons);

struct RepairResult {
  SbpOperatorPair op;
  PerturbationPlan plan;
};

/// Returns D+' = D+ + H^{-1} S' / 2 with S <- S + S' and D-' re-derived,
/// scaled so that |D+' - D+| <= target_eps in the chosen norm. Operators that
/// already have the eigenvalue property (at `tol`) come back unchanged with
/// an empty plan. Throws repair-impossible for operators that are not
/// nullspace consistent.
RepairResult repair_operator(const SbpOperatorPair& op, double target_eps, NormChoice norm_choice = NormChoice::frobenius,
                             double tol = kDefaultTolerance);

/// eps_k / 2 * |w|_H^2 for an imaginary eigenpair.
double predicted_shift(const HEigenPair& pair, double eps_k);

}  // namespace sbp
