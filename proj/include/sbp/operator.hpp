#pragma once

#include "sbp/linalg.hpp"

#include <string>

namespace sbp {

/// Closed interval [a, b] with b > a.
class Interval {
 public:
  Interval() = default;
  Interval(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_ = 0.0;
  double b_ = 1.0;
};

/// The full algebraic bundle of a summation-by-parts operator pair:
///
///   D+ x^j = j x^(j-1),  D- x^j = j x^(j-1),  p0^T x^j = a^j,  pn^T x^j = b^j   (j <= q)
///   H = H^T > 0
///   H D+ + D+^T H = -p0 p0^T + pn pn^T + S,   S = S^T >= 0
///   H D+ + D-^T H = -p0 p0^T + pn pn^T
///
/// on n+1 pairwise distinct nodes x. Matrices are dense and row-major.
struct SbpOperatorPair {
  std::string name;
  Matrix d_plus;
  Matrix d_minus;
  Matrix h;
  Matrix s;
  Vector p0;
  Vector pn;
  Vector x;
  int q = 1;
  Interval interval;

  /// Number of nodes, n + 1.
  Index size() const noexcept { return x.size(); }
  /// Polynomial degree n of the node set.
  Index degree() const noexcept { return x.size() - 1; }
};

enum class FlavorTag { classical, generalized, upwind, general };

std::string_view to_string(FlavorTag tag);

struct OperatorFlavor {
  FlavorTag tag = FlavorTag::general;
  bool s_zero = false;
  bool unit_boundary = false;  // p0 = e0 and pn = en
};

/// Tags the operator from the constraints it satisfies (entries compared to `tol`).
OperatorFlavor classify_flavor(const SbpOperatorPair& op, double tol = 0.0);

/// Shape, finiteness, order and node-distinctness checks. Throws shape or
/// invariant errors; does not evaluate any SBP residual.
void check_structure(const SbpOperatorPair& op);

/// The 6-node, order-1 operator that is nullspace consistent but whose
/// SAT-augmented matrix has the eigenvalues +-i/sqrt(5).
SbpOperatorPair build_counterexample();

/// Two nodes on [0, 1] with D+ = [[-1, 1], [-1, 1]].
SbpOperatorPair build_two_point();

/// Second-order classical operator on n+1 uniform nodes: central interior
/// stencil, one-sided boundary rows, H = dx diag(1/2, 1, ..., 1, 1/2).
SbpOperatorPair build_classical_fd(int n, Interval interval);

/// d_plus - h^{-1} s.
Matrix derive_d_minus(const Matrix& d_plus, const Matrix& h, const Matrix& s);

}  // namespace sbp
