#include "sbp/pseudospectral.hpp"

#include "sbp/error.hpp"
#include "sbp/spectral.hpp"
#include "sbp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sbp {

namespace {

constexpr const char* kModule = "pseudospectral";
constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxIterations = 100;

// P_k(t) and P_k'(t) by the three-term recurrence.
std::pair<double, double> legendre(int k, double t) {
  if (k == 0) return {1.0, 0.0};
  double p_prev = 1.0, p = t;
  double dp_prev = 0.0, dp = 1.0;
  for (int j = 2; j <= k; ++j) {
    const double p_next = ((2.0 * j - 1.0) * t * p - (j - 1.0) * p_prev) / j;
    const double dp_next = dp_prev + (2.0 * j - 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

Vector to_reference(const Vector& x, Interval iv) {
  return ((2.0 * x.array() - iv.a() - iv.b()) / iv.length()).matrix();
}

Vector from_reference(const Vector& t, Interval iv) {
  Vector x = (iv.a() + 0.5 * (t.array() + 1.0) * iv.length()).matrix();
  return x;
}

void require_nodes(const Vector& nodes) {
  if (nodes.size() < 2) {
    throw Error(ErrorCode::invalid_size, kModule, "need at least two nodes, got " + std::to_string(nodes.size()));
  }
  if (!nodes.allFinite()) throw Error(ErrorCode::invariant, kModule, "nodes must be finite");
  for (Index i = 0; i < nodes.size(); ++i) {
    for (Index j = i + 1; j < nodes.size(); ++j) {
      if (nodes(i) == nodes(j)) {
        throw Error(ErrorCode::distinctness, kModule,
                    "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide at " +
                        std::to_string(nodes(i)));
      }
    }
  }
}

// Interpolatory weights on [-1, 1] from the Legendre moment system
// sum_i w_i P_k(t_i) = integral of P_k = 2 delta_k0.
Vector reference_weights(const Vector& t) {
  const Index size = t.size();
  Eigen::MatrixXd system(size, size);
  for (Index k = 0; k < size; ++k)
    for (Index i = 0; i < size; ++i) system(k, i) = legendre(static_cast<int>(k), t(i)).first;
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(size);
  moments(0) = 2.0;
  return system.partialPivLu().solve(moments);
}

bool integrates_degree(const Vector& t, const Vector& w, int degree) {
  for (int k = 1; k <= degree; ++k) {
    double sum = 0.0;
    for (Index i = 0; i < t.size(); ++i) sum += w(i) * legendre(k, t(i)).first;
    if (std::abs(sum) > 1e-11) return false;
  }
  return true;
}

std::string format_interval(Interval iv) {
  std::ostringstream os;
  os << "[" << iv.a() << "," << iv.b() << "]";
  return os.str();
}

}  // namespace

std::string_view to_string(NodeFamilyTag tag) {
  switch (tag) {
    case NodeFamilyTag::legendre_gauss_lobatto: return "legendre_gauss_lobatto";
    case NodeFamilyTag::chebyshev_gauss_lobatto: return "chebyshev_gauss_lobatto";
    case NodeFamilyTag::uniform: return "uniform";
    case NodeFamilyTag::explicit_nodes: return "explicit";
  }
  return "explicit";
}

std::optional<NodeFamilyTag> parse_node_family(std::string_view text) {
  if (text == "lgl" || text == "legendre_gauss_lobatto") return NodeFamilyTag::legendre_gauss_lobatto;
  if (text == "cgl" || text == "chebyshev_gauss_lobatto") return NodeFamilyTag::chebyshev_gauss_lobatto;
  if (text == "uniform") return NodeFamilyTag::uniform;
  if (text == "explicit") return NodeFamilyTag::explicit_nodes;
  return std::nullopt;
}

Quadrature legendre_gauss_lobatto(int n) {
  if (n < 1 || n > kMaxPseudospectralDegree) {
    throw Error(ErrorCode::invalid_size, kModule, "Gauss-Lobatto degree must be in [1, 32], got " + std::to_string(n));
  }
  const Index size = n + 1;
  Vector t(size);
  for (Index i = 0; i < size; ++i) t(i) = -std::cos(std::numbers::pi * static_cast<double>(i) / n);

  // Newton on x P_n - P_{n-1} = 0 (equivalent to (1 - x^2) P_n' = 0).
  Vector p_n(size);
  for (int iter = 0;; ++iter) {
    if (iter == kNewtonMaxIterations) {
      throw Error(ErrorCode::decomposition, kModule, "Gauss-Lobatto Newton iteration did not converge");
    }
    double change = 0.0;
    for (Index i = 0; i < size; ++i) {
      const double pn = legendre(n, t(i)).first;
      const double pn1 = legendre(n - 1, t(i)).first;
      const double step = (t(i) * pn - pn1) / ((n + 1.0) * pn);
      t(i) -= step;
      change = std::max(change, std::abs(step));
    }
    if (change <= kNewtonTolerance) break;
  }
  t(0) = -1.0;
  t(n) = 1.0;
  // Symmetrize: t_i = -t_{n-i} exactly.
  for (Index i = 0; i < size / 2; ++i) {
    const double avg = 0.5 * (t(n - i) - t(i));
    t(i) = -avg;
    t(n - i) = avg;
  }
  if (size % 2 == 1) t(n / 2) = 0.0;

  Quadrature q{t, Vector(size)};
  for (Index i = 0; i < size; ++i) {
    const double pn = legendre(n, t(i)).first;
    q.weights(i) = 2.0 / (n * (n + 1.0) * pn * pn);
  }
  return q;
}

Quadrature legendre_gauss(int m) {
  if (m < 1) throw Error(ErrorCode::invalid_size, kModule, "Gauss rule needs at least one point");
  Quadrature q{Vector(m), Vector(m)};
  for (int i = 0; i < m; ++i) {
    double t = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int iter = 0;; ++iter) {
      if (iter == kNewtonMaxIterations) {
        throw Error(ErrorCode::decomposition, kModule, "Gauss-Legendre Newton iteration did not converge");
      }
      const auto [p, dp] = legendre(m, t);
      const double step = p / dp;
      t -= step;
      if (std::abs(step) <= kNewtonTolerance) break;
    }
    const double dp = legendre(m, t).second;
    q.nodes(i) = t;
    q.weights(i) = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return q;
}

NodeFamily NodeFamily::legendre_gauss_lobatto(int n, Interval interval) {
  NodeFamily f{NodeFamilyTag::legendre_gauss_lobatto, n, interval, {}};
  f.nodes = from_reference(sbp::legendre_gauss_lobatto(n).nodes, interval);
  f.nodes(0) = interval.a();
  f.nodes(n) = interval.b();
  return f;
}

NodeFamily NodeFamily::chebyshev_gauss_lobatto(int n, Interval interval) {
  if (n < 1 || n > kMaxPseudospectralDegree) {
    throw Error(ErrorCode::invalid_size, kModule, "degree must be in [1, 32], got " + std::to_string(n));
  }
  Vector t(n + 1);
  for (int i = 0; i <= n; ++i) t(i) = std::sin(std::numbers::pi * (2.0 * i - n) / (2.0 * n));
  NodeFamily f{NodeFamilyTag::chebyshev_gauss_lobatto, n, interval, from_reference(t, interval)};
  f.nodes(0) = interval.a();
  f.nodes(n) = interval.b();
  return f;
}

NodeFamily NodeFamily::uniform(int n, Interval interval) {
  if (n < 1 || n > kMaxPseudospectralDegree) {
    throw Error(ErrorCode::invalid_size, kModule, "degree must be in [1, 32], got " + std::to_string(n));
  }
  NodeFamily f{NodeFamilyTag::uniform, n, interval, Vector(n + 1)};
  for (int i = 0; i <= n; ++i) f.nodes(i) = interval.a() + interval.length() * i / n;
  f.nodes(n) = interval.b();
  return f;
}

NodeFamily NodeFamily::explicit_nodes(Vector nodes, Interval interval) {
  const int n = static_cast<int>(nodes.size()) - 1;
  NodeFamily f{NodeFamilyTag::explicit_nodes, n, interval, std::move(nodes)};
  check_family(f);
  return f;
}

std::string NodeFamily::label() const {
  return std::string(to_string(tag)) + "(n=" + std::to_string(n) + ", " + format_interval(interval) + ")";
}

void check_family(const NodeFamily& family) {
  require_nodes(family.nodes);
  if (family.n != family.nodes.size() - 1) {
    throw Error(ErrorCode::shape, kModule, "family degree does not match the node count");
  }
  if (family.n > kMaxPseudospectralDegree) {
    throw Error(ErrorCode::invalid_size, kModule, "degree above 32 is not supported");
  }
  for (Index i = 0; i + 1 < family.nodes.size(); ++i) {
    if (!(family.nodes(i) < family.nodes(i + 1))) {
      throw Error(ErrorCode::invariant, kModule, "nodes must be strictly increasing");
    }
  }
  const double a = family.interval.a(), b = family.interval.b();
  if (family.nodes(0) < a || family.nodes(family.n) > b) {
    throw Error(ErrorCode::invariant, kModule, "nodes must lie inside " + format_interval(family.interval));
  }
  const bool lobatto = family.tag == NodeFamilyTag::legendre_gauss_lobatto ||
                       family.tag == NodeFamilyTag::chebyshev_gauss_lobatto;
  if (lobatto && (family.nodes(0) != a || family.nodes(family.n) != b)) {
    throw Error(ErrorCode::invariant, kModule, "Lobatto nodes must include both endpoints");
  }
}

std::optional<std::string> conditioning_warning(const NodeFamily& family) {
  const bool lobatto = family.tag == NodeFamilyTag::legendre_gauss_lobatto ||
                       family.tag == NodeFamilyTag::chebyshev_gauss_lobatto;
  if (!lobatto && family.n > 12) {
    return "degree " + std::to_string(family.n) +
           " on non-Lobatto nodes: interpolation is ill-conditioned, expect residuals well above roundoff";
  }
  return std::nullopt;
}

Vector barycentric_weights(const Vector& nodes) {
  require_nodes(nodes);
  const Index size = nodes.size();
  // Scale differences by the capacity-like factor 4 / span to keep the
  // products within range for larger node counts.
  const double span = nodes.maxCoeff() - nodes.minCoeff();
  const double factor = 4.0 / span;
  Vector beta(size);
  for (Index i = 0; i < size; ++i) {
    double prod = 1.0;
    for (Index j = 0; j < size; ++j)
      if (j != i) prod *= factor * (nodes(i) - nodes(j));
    beta(i) = 1.0 / prod;
  }
  return beta;
}

Vector lagrange_basis(const Vector& nodes, const Vector& beta, double t) {
  const Index size = nodes.size();
  Vector out = Vector::Zero(size);
  for (Index i = 0; i < size; ++i) {
    if (t == nodes(i)) {
      out(i) = 1.0;
      return out;
    }
  }
  double denom = 0.0;
  for (Index i = 0; i < size; ++i) {
    out(i) = beta(i) / (t - nodes(i));
    denom += out(i);
  }
  return out / denom;
}

Matrix build_pseudospectral_d(const Vector& nodes) {
  const Vector beta = barycentric_weights(nodes);
  const Index size = nodes.size();
  Matrix d = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < size; ++j) {
      if (j == i) continue;
      d(i, j) = (beta(j) / beta(i)) / (nodes(i) - nodes(j));
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

InterpolatoryNorm build_interpolatory_h(const Vector& nodes, Interval interval) {
  require_nodes(nodes);
  InterpolatoryNorm out;
  out.weights = 0.5 * interval.length() * reference_weights(to_reference(nodes, interval));

  std::vector<Index> bad;
  for (Index i = 0; i < out.weights.size(); ++i)
    if (!(out.weights(i) > 0.0)) bad.push_back(i);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "interpolatory weights are not all positive:";
    for (Index i : bad) os << " w[" << i << "] = " << out.weights(i);
    throw Error(ErrorCode::indefinite_norm, kModule, os.str());
  }

  out.h = out.weights.asDiagonal();
  const Vector beta = barycentric_weights(nodes);
  out.p0 = lagrange_basis(nodes, beta, interval.a());
  out.pn = lagrange_basis(nodes, beta, interval.b());
  return out;
}

Matrix lagrange_mass_matrix(const Vector& nodes, Interval interval) {
  require_nodes(nodes);
  const Index size = nodes.size();
  const Vector beta = barycentric_weights(nodes);
  const Quadrature gauss = legendre_gauss(static_cast<int>(size));
  const Vector points = from_reference(gauss.nodes, interval);
  const double jacobian = 0.5 * interval.length();

  Matrix mass = Matrix::Zero(size, size);
  for (Index k = 0; k < points.size(); ++k) {
    const Vector basis = lagrange_basis(nodes, beta, points(k));
    mass += (gauss.weights(k) * jacobian) * basis * basis.transpose();
  }
  return 0.5 * (mass + mass.transpose());
}

Matrix vandermonde(const Vector& nodes) {
  const Index size = nodes.size();
  Matrix v(size, size);
  for (Index j = 0; j < size; ++j) v.col(j) = monomial(nodes, static_cast<int>(j));
  return v;
}

SbpOperatorPair build_pseudospectral_operator(const NodeFamily& family) {
  check_family(family);
  const int n = family.n;
  const Interval iv = family.interval;

  SbpOperatorPair op;
  op.name = family.label();
  op.x = family.nodes;
  op.q = n;
  op.interval = iv;
  op.d_plus = build_pseudospectral_d(family.nodes);
  op.d_minus = op.d_plus;
  op.s = Matrix::Zero(n + 1, n + 1);

  const InterpolatoryNorm norm = build_interpolatory_h(family.nodes, iv);
  op.p0 = norm.p0;
  op.pn = norm.pn;
  if (family.tag == NodeFamilyTag::legendre_gauss_lobatto) {
    op.h = (0.5 * iv.length() * sbp::legendre_gauss_lobatto(n).weights).asDiagonal();
  } else if (integrates_degree(to_reference(family.nodes, iv), norm.weights * (2.0 / iv.length()), 2 * n - 1)) {
    op.h = norm.h;
  } else {
    op.h = lagrange_mass_matrix(family.nodes, iv);
  }
  return op;
}

bool CertificationReport::all_certified() const {
  return std::all_of(entries.begin(), entries.end(), [](const CertificationEntry& e) { return e.certified; });
}

CertificationReport certify_node_sets(const std::vector<NodeFamily>& families, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::parameter, kModule, "tolerance must be positive");
  CertificationReport report;
  for (const NodeFamily& family : families) {
    CertificationEntry entry;
    entry.label = family.label();
    entry.tag = family.tag;
    entry.n = family.n;
    entry.interval = family.interval;

    SbpOperatorPair op;
    try {
      op = build_pseudospectral_operator(family);
      entry.constructed = true;
    } catch (const Error& e) {
      entry.error = e.what();
      report.entries.push_back(std::move(entry));
      continue;
    }

    const double magnitude = std::max(1.0, max_abs(op.x));
    entry.tolerance = tol * std::pow(magnitude, family.n);

    try {
      const VerificationReport verification = verify_all(op, entry.tolerance);
      entry.definition_passed = verification.all_residuals_passed() && verification.observed_order >= op.q;
      entry.ones_residual = verification.nullspace.ones_residual;
      entry.rank = verification.nullspace.rank_d_plus;

      const EigenvalueVerdict eig = check_eigenvalue_property(op, entry.tolerance);
      entry.min_real_part = eig.min_real_part;
      entry.band = eig.band;
      entry.offending = eig.offending;

      bool vandermonde_ok = true;
      if (family.n <= 8) {
        const Vector sv = singular_values(Matrix(vandermonde(op.x).transpose() * op.h));
        entry.vandermonde_sigma_min = sv(sv.size() - 1);
        vandermonde_ok = *entry.vandermonde_sigma_min > rank_threshold(sv(0), op.size());
      }
      entry.certified = entry.definition_passed && verification.nullspace_consistent && entry.rank == family.n &&
                        eig.holds && vandermonde_ok;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

void require_certified(const CertificationReport& report) {
  std::ostringstream os;
  bool failed = false;
  for (const auto& e : report.entries) {
    if (e.certified) continue;
    failed = true;
    os << " " << e.label;
    if (!e.error.empty()) os << " (" << e.error << ")";
    for (const Complex& z : e.offending) os << " lambda=" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    os << ";";
  }
  if (failed) throw Error(ErrorCode::certification, kModule, "uncertified families:" + os.str());
}

}  // namespace sbp
