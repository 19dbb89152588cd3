#include "sbp/report_json.hpp"

#include <cmath>

namespace sbp {

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json interleaved(const CVector& w) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < w.size(); ++i) {
    out.push_back(w(i).real());
    out.push_back(w(i).imag());
  }
  return out;
}

ordered_json row_major(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

}  // namespace

ordered_json complex_to_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json vector_to_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json to_json(const VerificationReport& report) {
  ordered_json out;
  out["tolerance"] = report.tolerance;
  ordered_json residuals = ordered_json::array();
  for (const auto& r : report.residuals) {
    residuals.push_back({{"property", std::string(to_string(r.property))}, {"residual", r.residual}, {"passed", r.passed}});
  }
  out["residuals"] = std::move(residuals);
  out["observed_order"] = report.observed_order;
  out["nullspace_consistent"] = report.nullspace_consistent;
  out["nullspace"] = {
      {"sigma_min_d_tilde", report.nullspace.sigma_min_d_tilde},
      {"sigma_max_d_tilde", report.nullspace.sigma_max_d_tilde},
      {"ones_residual", report.nullspace.ones_residual},
      {"rank_d_plus", report.nullspace.rank_d_plus},
      {"rank_threshold", report.nullspace.rank_threshold},
  };
  out["eigenvalue_property"] = report.eigenvalue_property;
  out["min_real_part"] = number_or_null(report.min_real_part);
  ordered_json offending = ordered_json::array();
  for (const Complex& z : report.offending_eigenvalues) offending.push_back(complex_to_json(z));
  out["offending_eigenvalues"] = std::move(offending);
  out["notes"] = report.notes;
  return out;
}

ordered_json to_json(const SpectralReport& report) {
  ordered_json out;
  out["tau_eig"] = report.tau_eig;
  out["scale"] = report.scale;
  out["band"] = report.band;
  ordered_json eigenvalues = ordered_json::array();
  ordered_json eigenvectors = ordered_json::array();
  ordered_json classes = ordered_json::array();
  ordered_json h_norms = ordered_json::array();
  ordered_json multiplicities = ordered_json::array();
  for (const auto& p : report.pairs) {
    eigenvalues.push_back(complex_to_json(p.lambda));
    eigenvectors.push_back(interleaved(p.w));
    classes.push_back(std::string(to_string(p.classification)));
    h_norms.push_back(p.h_norm);
    multiplicities.push_back({p.algebraic_multiplicity, p.geometric_multiplicity});
  }
  out["eigenvalues"] = std::move(eigenvalues);
  out["classifications"] = std::move(classes);
  out["h_norms"] = std::move(h_norms);
  out["multiplicities"] = std::move(multiplicities);
  out["eigenvectors"] = std::move(eigenvectors);
  out["m"] = report.m;
  out["zero_count"] = report.zero_count;
  ordered_json conj = ordered_json::array();
  for (const auto& [i, j] : report.conjugate_pairs) conj.push_back({i, j});
  out["conjugate_pairs"] = std::move(conj);

  ordered_json diagnostics = ordered_json::array();
  for (std::size_t k = 0; k < report.imaginary.size(); ++k) {
    const auto& l2 = report.boundary_residuals[k];
    diagnostics.push_back({{"index", report.imaginary[k]},
                      {"p0_w", l2.p0},
                      {"pn_w", l2.pn},
                      {"s_w", l2.s},
                      {"grid_inner_products", report.moment_residuals[k]}});
  }
  out["imaginary_diagnostics"] = std::move(diagnostics);
  out["orthogonality_defect"] = report.orthogonality_defect;
  out["imaginary_normal"] = report.imaginary_normal;
  out["negative_real_part_indices"] = report.negative_real_violations;
  return out;
}

ordered_json to_json(const PerturbationPlan& plan) {
  ordered_json out;
  out["norm_choice"] = std::string(to_string(plan.norm_choice));
  out["norm_bound"] = plan.norm_bound;
  out["epsilons"] = plan.epsilons;
  out["predicted_shifts"] = plan.predicted_shifts;
  out["shift_resolved"] = plan.shift_resolved;
  ordered_json modes = ordered_json::array();
  for (const auto& m : plan.modes) modes.push_back({{"lambda", complex_to_json(m.lambda)}, {"w", interleaved(m.w)}});
  out["modes"] = std::move(modes);
  out["n"] = plan.s_prime.rows() == 0 ? 0 : plan.s_prime.rows() - 1;
  out["S_prime"] = row_major(plan.s_prime);
  return out;
}

ordered_json to_json(const CertificationReport& report) {
  ordered_json out;
  out["all_certified"] = report.all_certified();
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json j;
    j["label"] = e.label;
    j["family"] = std::string(to_string(e.tag));
    j["n"] = e.n;
    j["interval"] = {e.interval.a(), e.interval.b()};
    j["constructed"] = e.constructed;
    j["error"] = e.error;
    j["tolerance"] = e.tolerance;
    j["definition_passed"] = e.definition_passed;
    j["ones_residual"] = e.ones_residual;
    j["rank"] = e.rank;
    j["min_real_part"] = number_or_null(e.min_real_part);
    j["band"] = e.band;
    j["vandermonde_sigma_min"] = e.vandermonde_sigma_min ? ordered_json(*e.vandermonde_sigma_min) : ordered_json(nullptr);
    ordered_json offending = ordered_json::array();
    for (const Complex& z : e.offending) offending.push_back(complex_to_json(z));
    j["offending"] = std::move(offending);
    j["certified"] = e.certified;
    entries.push_back(std::move(j));
  }
  out["entries"] = std::move(entries);
  return out;
}

ordered_json to_json(const ConvergenceStudy& study) {
  ordered_json out;
  ordered_json rows = ordered_json::array();
  for (const auto& r : study.rows) {
    rows.push_back({{"n", r.n}, {"spacing", r.spacing}, {"error_h", r.error_h}, {"error_max", r.error_max}});
  }
  out["rows"] = std::move(rows);
  ordered_json orders = ordered_json::array();
  for (double o : study.pairwise_orders) orders.push_back(number_or_null(o));
  out["pairwise_orders"] = std::move(orders);
  out["least_squares_order"] = number_or_null(study.least_squares_order);
  out["saturated"] = study.saturated;
  return out;
}

}  // namespace sbp
