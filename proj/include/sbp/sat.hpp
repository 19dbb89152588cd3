#pragma once

#include "sbp/operator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbp {

enum class FlowDirection { forward, reversed };

std::string_view to_string(FlowDirection d);

/// Model problem u' = f with one boundary datum. Forward flow imposes u(a)
/// with (D+, p0, sigma = 1); reversed flow imposes u(b) with (D-, pn, sigma = -1).
struct SatProblem {
  Vector f_samples;
  double u0 = 0.0;
  FlowDirection direction = FlowDirection::forward;

  double sigma() const noexcept { return direction == FlowDirection::forward ? 1.0 : -1.0; }
};

struct SatSystem {
  Matrix system_matrix;
  Vector rhs;
  std::string op_ref;
};

/// D u = f + sigma H^{-1} p (u0 - p^T u) with the solution-dependent penalty
/// moved to the left: (D + sigma H^{-1} p p^T) u = f + sigma H^{-1} p u0.
SatSystem assemble(const SbpOperatorPair& op, const SatProblem& problem);

/// LU with partial pivoting. Throws singular-system when the matrix is
/// numerically singular or the residual bound
/// |A u - rhs|_2 <= 1e-12 (|A|_F |u|_2 + |rhs|_2) is violated.
Vector solve(const SatSystem& system);

struct ExactnessOptions {
  int trials = 20;
  int degree = -1;  // -1 means the operator order q
  std::uint64_t seed = 20240607;
};

/// Solves with f = p' and u0 = p(a) for random polynomials p and returns the
/// largest nodal error relative to max|coefficient|.
double polynomial_exactness_check(const SbpOperatorPair& op, const ExactnessOptions& options = {});

using RealFunction = std::function<double(double)>;
using OperatorFamily = std::function<SbpOperatorPair(int)>;

struct ConvergenceRow {
  int n = 0;
  double spacing = 0.0;
  double error_h = 0.0;    // discrete H-norm
  double error_max = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<double> pairwise_orders;  // log(e_k / e_{k+1}) / log(h_k / h_{k+1})
  double least_squares_order = 0.0;     // slope of log e against log h
  bool saturated = false;               // errors at roundoff; orders are meaningless
};

/// Forward SAT solves on every grid (at least three) with u0 = exact_u(a).
ConvergenceStudy convergence_study(const OperatorFamily& family, const RealFunction& f, const RealFunction& exact_u,
                                   const std::vector<int>& grid_list);

/// Built-in smooth data: the right-hand side f = u' and the exact solution u.
struct NamedFunction {
  std::string name;
  RealFunction f;
  RealFunction u;
};

/// sin, cos, exp, const, linear.
std::optional<NamedFunction> named_function(std::string_view name);

}  // namespace sbp
