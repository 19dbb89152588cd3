#include "sbp/operator.hpp"

#include "sbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sbp {

namespace {

constexpr const char* kModule = "operator-core";

void require_square(const Matrix& m, Index size, const char* field) {
  if (m.rows() != size || m.cols() != size) {
    throw Error(ErrorCode::shape, kModule,
                std::string(field) + " must be " + std::to_string(size) + "x" + std::to_string(size) + ", got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw Error(ErrorCode::invariant, kModule, std::string(field) + " has non-finite entries");
}

void require_length(const Vector& v, Index size, const char* field) {
  if (v.size() != size) {
    throw Error(ErrorCode::shape, kModule,
                std::string(field) + " must have length " + std::to_string(size) + ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw Error(ErrorCode::invariant, kModule, std::string(field) + " has non-finite entries");
}

bool is_unit_vector(const Vector& v, Index k, double tol) {
  for (Index i = 0; i < v.size(); ++i) {
    const double target = i == k ? 1.0 : 0.0;
    if (std::abs(v(i) - target) > tol) return false;
  }
  return true;
}

Vector unit_vector(Index size, Index k) {
  Vector e = Vector::Zero(size);
  e(k) = 1.0;
  return e;
}

}  // namespace

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!(std::isfinite(a) && std::isfinite(b) && b > a)) {
    throw Error(ErrorCode::invariant, kModule,
                "interval requires finite endpoints with b > a, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
}

std::string_view to_string(FlavorTag tag) {
  switch (tag) {
    case FlavorTag::classical: return "classical";
    case FlavorTag::generalized: return "generalized";
    case FlavorTag::upwind: return "upwind";
    case FlavorTag::general: return "general";
  }
  return "general";
}

OperatorFlavor classify_flavor(const SbpOperatorPair& op, double tol) {
  OperatorFlavor flavor;
  flavor.s_zero = max_abs(op.s) <= tol;
  flavor.unit_boundary = is_unit_vector(op.p0, 0, tol) && is_unit_vector(op.pn, op.size() - 1, tol);
  if (flavor.s_zero && flavor.unit_boundary) {
    flavor.tag = FlavorTag::classical;
  } else if (flavor.s_zero) {
    flavor.tag = FlavorTag::generalized;
  } else if (flavor.unit_boundary) {
    flavor.tag = FlavorTag::upwind;
  }
  return flavor;
}

void check_structure(const SbpOperatorPair& op) {
  const Index size = op.x.size();
  if (size < 2) throw Error(ErrorCode::invalid_size, kModule, "an operator needs at least two nodes");
  if (op.q < 1) throw Error(ErrorCode::invariant, kModule, "order q must be at least 1");
  require_length(op.x, size, "x");
  require_square(op.d_plus, size, "D_plus");
  require_square(op.d_minus, size, "D_minus");
  require_square(op.h, size, "H");
  require_square(op.s, size, "S");
  require_length(op.p0, size, "p0");
  require_length(op.pn, size, "pn");

  std::vector<double> sorted(op.x.data(), op.x.data() + size);
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw Error(ErrorCode::invariant, kModule,
                "distinct-nodes: grid nodes must be pairwise distinct, value " + std::to_string(*dup) + " repeats");
  }
}

SbpOperatorPair build_counterexample() {
  SbpOperatorPair op;
  op.name = "counterexample";
  op.d_plus.resize(6, 6);
  op.d_plus << -5, 4, 2, 0, -2, 1,
               -2, 0, 1, 0, 2, -1,
               -1, -1, 0, 2, 0, 0,
                0, 0, -2, 0, 1, 1,
                1, -2, 0, -1, 0, 2,
               -1, 2, 0, -2, -4, 5;
  op.d_plus /= 5.0;
  op.h = Vector{{0.5, 1.0, 1.0, 1.0, 1.0, 0.5}}.asDiagonal();
  op.s = Matrix::Zero(6, 6);
  op.d_minus = op.d_plus;
  op.p0 = unit_vector(6, 0);
  op.pn = unit_vector(6, 5);
  op.x = Vector{{-5.0, -3.0, -1.0, 1.0, 3.0, 5.0}} / 2.0;
  op.q = 1;
  op.interval = Interval(-2.5, 2.5);
  return op;
}

SbpOperatorPair build_two_point() {
  SbpOperatorPair op;
  op.name = "two_point";
  op.d_plus.resize(2, 2);
  op.d_plus << -1, 1,
               -1, 1;
  op.d_minus = op.d_plus;
  op.h = Vector{{0.5, 0.5}}.asDiagonal();
  op.s = Matrix::Zero(2, 2);
  op.p0 = unit_vector(2, 0);
  op.pn = unit_vector(2, 1);
  op.x = Vector{{0.0, 1.0}};
  op.q = 1;
  op.interval = Interval(0.0, 1.0);
  return op;
}

SbpOperatorPair build_classical_fd(int n, Interval interval) {
  if (n < 2) {
    throw Error(ErrorCode::invalid_size, kModule, "classical operator needs n >= 2, got n = " + std::to_string(n));
  }
  const Index size = n + 1;
  const double dx = interval.length() / n;

  SbpOperatorPair op;
  op.name = "classical_fd_" + std::to_string(n);
  op.d_plus = Matrix::Zero(size, size);
  op.d_plus(0, 0) = -1.0 / dx;
  op.d_plus(0, 1) = 1.0 / dx;
  for (Index i = 1; i < n; ++i) {
    op.d_plus(i, i - 1) = -0.5 / dx;
    op.d_plus(i, i + 1) = 0.5 / dx;
  }
  op.d_plus(n, n - 1) = -1.0 / dx;
  op.d_plus(n, n) = 1.0 / dx;
  op.d_minus = op.d_plus;

  Vector weights = Vector::Constant(size, dx);
  weights(0) = weights(n) = 0.5 * dx;
  op.h = weights.asDiagonal();
  op.s = Matrix::Zero(size, size);
  op.p0 = unit_vector(size, 0);
  op.pn = unit_vector(size, n);

  op.x.resize(size);
  for (Index i = 0; i < size; ++i) op.x(i) = interval.a() + static_cast<double>(i) * dx;
  op.x(n) = interval.b();
  op.q = 1;
  op.interval = interval;
  return op;
}

Matrix derive_d_minus(const Matrix& d_plus, const Matrix& h, const Matrix& s) {
  if (d_plus.rows() != h.rows() || s.rows() != h.rows() || d_plus.cols() != s.cols()) {
    throw Error(ErrorCode::shape, kModule, "D_plus, H and S must share one square shape");
  }
  if (max_abs(s) == 0.0) {
    // Still reject singular H even when the correction vanishes.
    solve_norm(h, Vector::Zero(h.rows()).eval());
    return d_plus;
  }
  return d_plus - solve_norm(h, s);
}

}  // namespace sbp
