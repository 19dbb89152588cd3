#include "sbp/verify.hpp"

#include "sbp/error.hpp"
#include "sbp/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace sbp {

namespace {

constexpr const char* kModule = "verify";
// Roundoff allowance for the smallest eigenvalue of S, relative to |S|_F.
constexpr double kPsdRelative = 1e-12;

Matrix boundary_term(const SbpOperatorPair& op) {
  return -op.p0 * op.p0.transpose() + op.pn * op.pn.transpose();
}

PropertyResidual make(Property p, double residual, double tol) { return {p, residual, residual <= tol}; }

}  // namespace

std::string_view to_string(Property p) {
  switch (p) {
    case Property::A_dplus: return "A_dplus";
    case Property::A_dminus: return "A_dminus";
    case Property::A_p0: return "A_p0";
    case Property::A_pn: return "A_pn";
    case Property::B_spd: return "B_spd";
    case Property::C_identity: return "C_identity";
    case Property::D_identity: return "D_identity";
    case Property::S_symmetry: return "S_symmetry";
    case Property::S_psd: return "S_psd";
    case Property::S_annihilation: return "S_annihilation";
  }
  return "unknown";
}

std::array<PropertyResidual, 4> AccuracyCheck::summarize(int j_limit, double tol) const {
  double dp = 0.0, dm = 0.0, p0 = 0.0, pn = 0.0;
  for (const auto& row : rows) {
    if (row.j > j_limit) break;
    dp = std::max(dp, row.d_plus);
    dm = std::max(dm, row.d_minus);
    p0 = std::max(p0, row.p0);
    pn = std::max(pn, row.pn);
  }
  return {make(Property::A_dplus, dp, tol), make(Property::A_dminus, dm, tol), make(Property::A_p0, p0, tol),
          make(Property::A_pn, pn, tol)};
}

AccuracyCheck check_accuracy(const SbpOperatorPair& op, int j_max, double tol) {
  if (j_max < 0) throw Error(ErrorCode::parameter, kModule, "j_max must be non-negative");
  AccuracyCheck out;
  bool prefix_ok = true;
  for (int j = 0; j <= j_max; ++j) {
    const Vector xj = monomial(op.x, j);
    const Vector derivative = static_cast<double>(j) * monomial(op.x, j - 1);
    AccuracyRow row;
    row.j = j;
    row.d_plus = max_abs(Vector(op.d_plus * xj - derivative));
    row.d_minus = max_abs(Vector(op.d_minus * xj - derivative));
    row.p0 = std::abs(op.p0.dot(xj) - std::pow(op.interval.a(), j));
    row.pn = std::abs(op.pn.dot(xj) - std::pow(op.interval.b(), j));
    row.passed = row.d_plus <= tol && row.d_minus <= tol && row.p0 <= tol && row.pn <= tol;
    prefix_ok = prefix_ok && row.passed;
    if (prefix_ok) out.observed_order = j;
    out.rows.push_back(row);
  }
  return out;
}

PropertyResidual check_spd(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::shape, kModule, "norm matrix must be square");
  const double asym = max_abs(Matrix(h - h.transpose()));
  const double lambda_min = min_symmetric_eigenvalue(h);
  PropertyResidual r{Property::B_spd, std::max(asym, std::max(0.0, -lambda_min)), false};
  r.passed = asym <= tol && lambda_min > tol * max_abs(h);
  return r;
}

std::array<PropertyResidual, 2> check_sbp_identities(const SbpOperatorPair& op, double tol) {
  const Matrix hd = op.h * op.d_plus;
  const Matrix b = boundary_term(op);
  const Matrix c_defect = hd + op.d_plus.transpose() * op.h - b - op.s;
  const Matrix d_defect = hd + op.d_minus.transpose() * op.h - b;
  return {make(Property::C_identity, max_abs(c_defect), tol), make(Property::D_identity, max_abs(d_defect), tol)};
}

std::array<PropertyResidual, 3> check_s_conditions(const SbpOperatorPair& op, double tol) {
  const double asym = max_abs(Matrix(op.s - op.s.transpose()));
  const double s_norm = op.s.norm();
  const double negativity = s_norm == 0.0 ? 0.0 : std::max(0.0, -min_symmetric_eigenvalue(op.s));
  double annihilation = 0.0;
  for (int j = 0; j <= op.q; ++j) annihilation = std::max(annihilation, max_abs(Vector(op.s * monomial(op.x, j))));

  PropertyResidual psd{Property::S_psd, negativity, negativity <= kPsdRelative * s_norm};
  return {make(Property::S_symmetry, asym, tol), psd, make(Property::S_annihilation, annihilation, tol)};
}

NullspaceDiagnostics check_nullspace_consistency(const SbpOperatorPair& op, double tol) {
  NullspaceDiagnostics diag;
  const Vector sv_tilde = singular_values(build_d_tilde(op));
  diag.sigma_max_d_tilde = sv_tilde(0);
  diag.sigma_min_d_tilde = sv_tilde(sv_tilde.size() - 1);
  const bool via_d_tilde = diag.sigma_min_d_tilde > tol * diag.sigma_max_d_tilde;

  const Vector sv = singular_values(op.d_plus);
  diag.rank_threshold = std::max(rank_threshold(sv(0), op.size()), tol * sv(0));
  diag.rank_d_plus = static_cast<Index>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > diag.rank_threshold; }));
  diag.ones_residual = max_abs(Vector(op.d_plus * Vector::Ones(op.size())));
  const bool constants_in_kernel = diag.ones_residual <= tol * std::max(1.0, max_abs(op.d_plus));
  const bool via_rank = constants_in_kernel && diag.rank_d_plus == op.degree();

  // The equivalence needs D+ 1 = 0 and the SBP identities.
  bool identities_hold = false;
  try {
    const auto identities = check_sbp_identities(op, tol);
    identities_hold = identities[0].passed && identities[1].passed;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_norm) throw;
  }
  if (constants_in_kernel && identities_hold && via_d_tilde != via_rank) {
    throw Error(ErrorCode::internal_inconsistency, kModule,
                "nullspace routes disagree: sigma_min(D~+) = " + std::to_string(diag.sigma_min_d_tilde) +
                    ", rank(D+) = " + std::to_string(diag.rank_d_plus) + " (borderline conditioning)");
  }
  diag.consistent = via_rank;
  return diag;
}

EigenvalueVerdict check_eigenvalue_property(const SbpOperatorPair& op, double tol) {
  const Matrix d_tilde = build_d_tilde(op);
  EigenvalueVerdict verdict;
  verdict.band = tol * d_tilde.norm();
  verdict.min_real_part = std::numeric_limits<double>::infinity();
  for (const HEigenPair& p : eigen_decompose(d_tilde)) {
    verdict.min_real_part = std::min(verdict.min_real_part, p.lambda.real());
    if (p.lambda.real() <= verdict.band) verdict.offending.push_back(p.lambda);
  }
  verdict.holds = verdict.offending.empty();
  return verdict;
}

bool VerificationReport::all_residuals_passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const PropertyResidual& r) { return r.passed; });
}

const PropertyResidual& VerificationReport::find(Property p) const {
  for (const auto& r : residuals)
    if (r.property == p) return r;
  throw Error(ErrorCode::contract, kModule, "report has no residual for " + std::string(to_string(p)));
}

VerificationReport verify_all(const SbpOperatorPair& op, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::parameter, kModule, "tolerance must be positive");
  check_structure(op);

  VerificationReport report;
  report.tolerance = tol;

  const AccuracyCheck accuracy = check_accuracy(op, op.q + 1, tol);
  report.observed_order = accuracy.observed_order;
  for (const auto& r : accuracy.summarize(op.q, tol)) report.residuals.push_back(r);
  report.residuals.push_back(check_spd(op.h, tol));
  for (const auto& r : check_sbp_identities(op, tol)) report.residuals.push_back(r);
  for (const auto& r : check_s_conditions(op, tol)) report.residuals.push_back(r);

  try {
    report.nullspace = check_nullspace_consistency(op, tol);
    report.nullspace_consistent = report.nullspace.consistent;
    const EigenvalueVerdict eig = check_eigenvalue_property(op, tol);
    report.min_real_part = eig.min_real_part;
    report.offending_eigenvalues = eig.offending;
    report.eigenvalue_property = eig.holds && report.nullspace_consistent;
    if (eig.holds && !report.nullspace_consistent) {
      report.notes.push_back("spectrum lies in the right half-plane but D+ 1 != 0; eigenvalue property not claimed");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_norm) throw;
    report.notes.push_back(e.what());
  }
  return report;
}

}  // namespace sbp
