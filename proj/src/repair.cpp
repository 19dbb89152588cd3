#include "sbp/repair.hpp"

#include "sbp/error.hpp"
#include "sbp/verify.hpp"

#include <algorithm>
#include <cmath>

namespace sbp {

namespace {

constexpr const char* kModule = "repair";

Matrix half_weighted(const Matrix& h, const Matrix& s_prime) { return 0.5 * solve_norm(h, s_prime); }

void check_modes(const Matrix& h, const std::vector<ImaginaryMode>& modes) {
  if (modes.size() % 2 != 0) throw Error(ErrorCode::contract, kModule, "modes must come in conjugate pairs");
  for (std::size_t k = 0; k < modes.size(); k += 2) {
    const auto& w = modes[k].w;
    const auto& partner = modes[k + 1].w;
    if (w.size() != h.rows() || partner.size() != h.rows()) {
      throw Error(ErrorCode::shape, kModule, "mode length does not match the norm matrix");
    }
    if ((partner - w.conjugate()).cwiseAbs().maxCoeff() > 1e-8) {
      throw Error(ErrorCode::contract, kModule, "mode " + std::to_string(k + 1) + " is not the conjugate of mode " + std::to_string(k));
    }
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      const Complex g = h_inner(modes[i].w, modes[j].w, h);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(g - expected) > 1e-8) {
        throw Error(ErrorCode::contract, kModule,
                    "modes are not H-orthonormal: <w" + std::to_string(i) + ", w" + std::to_string(j) + "> = " +
                        std::to_string(std::abs(g)));
      }
    }
  }
}

}  // namespace

std::string_view to_string(NormChoice choice) {
  return choice == NormChoice::spectral ? "spectral" : "frobenius";
}

std::optional<NormChoice> parse_norm_choice(std::string_view text) {
  if (text == "frobenius") return NormChoice::frobenius;
  if (text == "spectral") return NormChoice::spectral;
  return std::nullopt;
}

double matrix_norm(const Matrix& m, NormChoice choice) {
  return choice == NormChoice::spectral ? spectral_norm(m) : m.norm();
}

Matrix build_s_prime(const Matrix& h, const std::vector<ImaginaryMode>& modes, const std::vector<double>& epsilons) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::shape, kModule, "norm matrix must be square");
  const Index size = h.rows();
  if (epsilons.size() * 2 != modes.size()) {
    throw Error(ErrorCode::parameter, kModule,
                "need one epsilon per conjugate pair: " + std::to_string(modes.size() / 2) + " pairs, " +
                    std::to_string(epsilons.size()) + " epsilons");
  }
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw Error(ErrorCode::parameter, kModule, "every epsilon must be positive, got " + std::to_string(eps));
  }
  if (modes.empty()) return Matrix::Zero(size, size);
  check_modes(h, modes);

  const CMatrix hc = h.cast<Complex>();
  CMatrix sum = CMatrix::Zero(size, size);
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    for (const CVector& w : {modes[2 * k].w, modes[2 * k + 1].w}) {
      const CVector hw = hc * w;
      sum += epsilons[k] * (hw * hw.adjoint());
    }
  }
  const double magnitude = sum.norm();
  if (sum.imag().norm() > 1e-13 * magnitude) {
    throw Error(ErrorCode::contract, kModule, "assembled dissipation is not real");
  }
  Matrix s_prime = sum.real();
  // Exact symmetry; the assembled sum is Hermitian up to roundoff.
  s_prime = 0.5 * (s_prime + s_prime.transpose()).eval();
  return s_prime;
}

double predicted_shift(const HEigenPair& pair, double eps_k) {
  if (pair.classification != EigenClass::imaginary) {
    throw Error(ErrorCode::contract, kModule, "predicted shift applies to imaginary eigenpairs only");
  }
  return 0.5 * eps_k * pair.h_norm * pair.h_norm;
}

RepairResult repair_operator(const SbpOperatorPair& op, double target_eps, NormChoice norm_choice, double tol) {
  if (!(target_eps > 0.0)) throw Error(ErrorCode::parameter, kModule, "target epsilon must be positive");
  check_structure(op);

  if (!check_nullspace_consistency(op, tol).consistent) {
    throw Error(ErrorCode::repair_impossible, kModule,
                "operator is not nullspace consistent; a zero eigenvalue cannot be shifted by dissipation");
  }

  RepairResult result{op, {}};
  result.plan.norm_choice = norm_choice;
  result.plan.s_prime = Matrix::Zero(op.size(), op.size());

  const SpectralReport spectrum = analyze_spectrum(op, tol);
  if (spectrum.m == 0) return result;

  PerturbationPlan& plan = result.plan;
  plan.modes = orthogonalize_imaginary(spectrum, op.h);
  const std::size_t m = plan.modes.size() / 2;

  // Unit coefficients first; the norm is linear in a common scale factor.
  const Matrix unit = build_s_prime(op.h, plan.modes, std::vector<double>(m, 1.0));
  const double unit_norm = matrix_norm(half_weighted(op.h, unit), norm_choice);
  if (!(unit_norm > 0.0)) throw Error(ErrorCode::internal_inconsistency, kModule, "unit perturbation has zero norm");

  // Aim below the budget until the floating-point difference of the stored
  // operators honours it; a handful of passes suffices.
  double planned = target_eps;
  SbpOperatorPair repaired = op;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double eps = planned / unit_norm;
    plan.epsilons.assign(m, eps);
    plan.s_prime = build_s_prime(op.h, plan.modes, plan.epsilons);
    repaired.d_plus = op.d_plus + half_weighted(op.h, plan.s_prime);
    plan.norm_bound = matrix_norm(Matrix(repaired.d_plus - op.d_plus), norm_choice);
    if (plan.norm_bound <= target_eps) break;
    planned *= (target_eps / plan.norm_bound) * (target_eps / plan.norm_bound);
  }
  if (plan.norm_bound > target_eps) {
    throw Error(ErrorCode::internal_inconsistency, kModule, "could not meet the perturbation budget");
  }

  repaired.s = op.s + plan.s_prime;
  repaired.d_minus = derive_d_minus(repaired.d_plus, repaired.h, repaired.s);
  if (!op.name.empty()) repaired.name = op.name + "+repaired";

  plan.predicted_shifts.clear();
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    const double shift = 0.5 * plan.epsilons[k] * h_norm(plan.modes[2 * k].w, op.h) * h_norm(plan.modes[2 * k].w, op.h);
    plan.predicted_shifts.push_back(shift);
    smallest = std::min(smallest, shift);
  }
  plan.shift_resolved = smallest > spectrum.band;

  result.op = std::move(repaired);
  return result;
}

}  // namespace sbp
