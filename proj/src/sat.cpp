#include "sbp/sat.hpp"

#include "sbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sbp {

namespace {

constexpr const char* kModule = "sat-solve";

double horner(const std::vector<double>& coeffs, double t) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

}  // namespace

std::string_view to_string(FlowDirection d) { return d == FlowDirection::forward ? "forward" : "reversed"; }

SatSystem assemble(const SbpOperatorPair& op, const SatProblem& problem) {
  if (problem.f_samples.size() != op.size()) {
    throw Error(ErrorCode::shape, kModule,
                "f has " + std::to_string(problem.f_samples.size()) + " samples, operator has " +
                    std::to_string(op.size()) + " nodes");
  }
  const bool forward = problem.direction == FlowDirection::forward;
  const Matrix& d = forward ? op.d_plus : op.d_minus;
  const Vector& p = forward ? op.p0 : op.pn;
  const double sigma = problem.sigma();

  const Vector penalty = solve_norm(op.h, p);
  SatSystem sys;
  sys.system_matrix = d + sigma * penalty * p.transpose();
  sys.rhs = problem.f_samples + sigma * problem.u0 * penalty;
  sys.op_ref = op.name;
  return sys;
}

Vector solve(const SatSystem& system) {
  const Matrix& a = system.system_matrix;
  if (a.rows() != a.cols() || a.rows() != system.rhs.size()) {
    throw Error(ErrorCode::shape, kModule, "system matrix and right-hand side do not conform");
  }
  const Eigen::MatrixXd dense = a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
  const double rcond = lu.rcond();
  // rcond() misses exact zero pivots, so check the U diagonal as well.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double cutoff = 64.0 * static_cast<double>(a.rows()) * kUnitRoundoff;
  if (!(rcond > cutoff) || !(pivots.minCoeff() > cutoff * pivots.maxCoeff())) {
    throw Error(ErrorCode::singular_system, kModule,
                "SAT system is numerically singular (rcond " + std::to_string(rcond) +
                    "); the operator is not nullspace consistent");
  }
  const Vector u = lu.solve(Eigen::VectorXd(system.rhs));
  const double residual = (dense * u - system.rhs).norm();
  const double bound = 1e-12 * (a.norm() * u.norm() + system.rhs.norm());
  if (!(residual <= bound)) {
    throw Error(ErrorCode::singular_system, kModule,
                "solve residual " + std::to_string(residual) + " exceeds " + std::to_string(bound));
  }
  return u;
}

double polynomial_exactness_check(const SbpOperatorPair& op, const ExactnessOptions& options) {
  const int degree = options.degree < 0 ? op.q : options.degree;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  double worst = 0.0;
  for (int trial = 0; trial < options.trials; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (double& v : c) v = coeff(rng);
    std::vector<double> dc;
    for (std::size_t k = 1; k < c.size(); ++k) dc.push_back(static_cast<double>(k) * c[k]);

    SatProblem problem;
    problem.f_samples = op.x.unaryExpr([&](double t) { return horner(dc, t); });
    problem.u0 = horner(c, op.interval.a());
    const Vector u = solve(assemble(op, problem));

    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    const Vector exact = op.x.unaryExpr([&](double t) { return horner(c, t); });
    worst = std::max(worst, max_abs(Vector(u - exact)) / scale);
  }
  return worst;
}

ConvergenceStudy convergence_study(const OperatorFamily& family, const RealFunction& f, const RealFunction& exact_u,
                                   const std::vector<int>& grid_list) {
  if (grid_list.size() < 3) {
    throw Error(ErrorCode::parameter, kModule, "a convergence study needs at least three resolutions");
  }
  ConvergenceStudy study;
  for (int n : grid_list) {
    const SbpOperatorPair op = family(n);
    SatProblem problem;
    problem.f_samples = op.x.unaryExpr(f);
    problem.u0 = exact_u(op.interval.a());
    const Vector u = solve(assemble(op, problem));
    const Vector err = u - op.x.unaryExpr(exact_u);

    ConvergenceRow row;
    row.n = n;
    row.spacing = op.interval.length() / n;
    row.error_h = std::sqrt(std::max(0.0, err.dot(op.h * err)));
    row.error_max = max_abs(err);
    study.rows.push_back(row);
  }

  const double floor = 1e-13;
  study.saturated = std::all_of(study.rows.begin(), study.rows.end(),
                                [&](const ConvergenceRow& r) { return r.error_h <= floor; });
  if (study.saturated) {
    study.pairwise_orders.assign(study.rows.size() - 1, std::numeric_limits<double>::quiet_NaN());
    study.least_squares_order = std::numeric_limits<double>::quiet_NaN();
    return study;
  }

  for (std::size_t k = 0; k + 1 < study.rows.size(); ++k) {
    const auto& r0 = study.rows[k];
    const auto& r1 = study.rows[k + 1];
    study.pairwise_orders.push_back(std::log(r0.error_h / r1.error_h) / std::log(r0.spacing / r1.spacing));
  }

  double mx = 0.0, my = 0.0;
  for (const auto& r : study.rows) {
    mx += std::log(r.spacing);
    my += std::log(r.error_h);
  }
  const double count = static_cast<double>(study.rows.size());
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : study.rows) {
    const double dx = std::log(r.spacing) - mx;
    sxy += dx * (std::log(r.error_h) - my);
    sxx += dx * dx;
  }
  study.least_squares_order = sxy / sxx;
  return study;
}

std::optional<NamedFunction> named_function(std::string_view name) {
  if (name == "sin") return NamedFunction{"sin", [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }};
  if (name == "cos") return NamedFunction{"cos", [](double t) { return -std::sin(t); }, [](double t) { return std::cos(t); }};
  if (name == "exp") return NamedFunction{"exp", [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); }};
  if (name == "const") return NamedFunction{"const", [](double) { return 0.0; }, [](double) { return 1.0; }};
  if (name == "linear") return NamedFunction{"linear", [](double) { return 1.0; }, [](double t) { return t; }};
  return std::nullopt;
}

}  // namespace sbp
