#pragma once

#include "sbp/operator.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbp {

enum class NodeFamilyTag { legendre_gauss_lobatto, chebyshev_gauss_lobatto, uniform, explicit_nodes };

std::string_view to_string(NodeFamilyTag tag);
/// Accepts the long names above plus the short forms lgl, cgl, uniform, explicit.
std::optional<NodeFamilyTag> parse_node_family(std::string_view text);

inline constexpr int kMaxPseudospectralDegree = 32;

/// Node set on an interval: nodes strictly increasing inside [a, b], with
/// both endpoints included for the Lobatto families.
struct NodeFamily {
  NodeFamilyTag tag = NodeFamilyTag::explicit_nodes;
  int n = 1;
  Interval interval;
  Vector nodes;

  static NodeFamily legendre_gauss_lobatto(int n, Interval interval);
  static NodeFamily chebyshev_gauss_lobatto(int n, Interval interval);
  static NodeFamily uniform(int n, Interval interval);
  static NodeFamily explicit_nodes(Vector nodes, Interval interval);

  std::string label() const;
};

/// Throws invariant/size errors when the family violates its invariants.
void check_family(const NodeFamily& family);

/// Message for degrees where rounding in the construction becomes visible.
std::optional<std::string> conditioning_warning(const NodeFamily& family);

struct Quadrature {
  Vector nodes;
  Vector weights;
};

/// Gauss-Lobatto points (zeros of (1 - x^2) P_n') and weights on [-1, 1],
/// ascending. Newton iteration from Chebyshev-Lobatto guesses.
Quadrature legendre_gauss_lobatto(int n);

/// m-point Gauss-Legendre rule on [-1, 1], ascending.
Quadrature legendre_gauss(int m);

/// beta_i = 1 / prod_{j != i} (x_i - x_j), up to a common scale.
Vector barycentric_weights(const Vector& nodes);

/// L_i(t) for every cardinal polynomial of the node set.
Vector lagrange_basis(const Vector& nodes, const Vector& beta, double t);

/// Differentiation matrix exact for polynomials of degree <= n:
/// d_ij = (beta_j / beta_i) / (x_i - x_j), d_ii = -sum_{j != i} d_ij.
Matrix build_pseudospectral_d(const Vector& nodes);

struct InterpolatoryNorm {
  Vector weights;  // omega_i = integral of L_i over the interval
  Matrix h;        // diag(weights)
  Vector p0;       // L_i(a)
  Vector pn;       // L_i(b)
};

/// Interpolatory quadrature weights from moment matching; throws an
/// indefinite-norm error if any weight is non-positive.
InterpolatoryNorm build_interpolatory_h(const Vector& nodes, Interval interval);

/// M_ij = integral of L_i L_j over the interval (symmetric positive definite).
Matrix lagrange_mass_matrix(const Vector& nodes, Interval interval);

/// Row-major Vandermonde matrix V_ij = x_i^j.
Matrix vandermonde(const Vector& nodes);

/// Full bundle with q = n, S = 0 and D- = D+. The diagonal interpolatory norm
/// is used when that quadrature integrates degree 2n - 1 exactly (Lobatto
/// nodes); otherwise the Lagrange mass matrix is used so that the boundary
/// identity holds. Non-positive interpolatory weights are rejected.
SbpOperatorPair build_pseudospectral_operator(const NodeFamily& family);

struct CertificationEntry {
  std::string label;
  NodeFamilyTag tag = NodeFamilyTag::explicit_nodes;
  int n = 0;
  Interval interval;
  bool constructed = false;
  std::string error;
  double tolerance = 0.0;        // run tolerance after degree scaling
  bool definition_passed = false;
  double ones_residual = 0.0;    // max |D+ 1|
  Index rank = 0;
  double min_real_part = 0.0;
  double band = 0.0;
  std::optional<double> vandermonde_sigma_min;  // sigma_min(V^T H), small n only
  std::vector<Complex> offending;
  bool certified = false;
};

struct CertificationReport {
  std::vector<CertificationEntry> entries;
  bool all_certified() const;
};

/// For each family: builds the bundle, verifies it at
/// tol * max(1, max|x_i|)^n, checks D+ 1 = 0 and rank n, the eigenvalue
/// property, and (for n <= 8) that V^T H has full rank.
CertificationReport certify_node_sets(const std::vector<NodeFamily>& families, double tol = 1e-8);

/// Throws a certification error listing every failed entry.
void require_certified(const CertificationReport& report);

}  // namespace sbp
