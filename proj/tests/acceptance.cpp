// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "sbp/error.hpp"
#include "sbp/io.hpp"
#include "sbp/linalg.hpp"
#include "sbp/operator.hpp"
#include "sbp/pseudospectral.hpp"
#include "sbp/repair.hpp"
#include "sbp/sat.hpp"
#include "sbp/spectral.hpp"
#include "sbp/verify.hpp"

namespace {

using sbp::Complex;
using sbp::Interval;
using sbp::NodeFamily;

const double kInvSqrt5 = 1.0 / std::sqrt(5.0);

// Collects the first few failed checks for the report line.
struct Checker {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  std::string summary() const {
    std::string text;
    for (std::size_t i = 0; i < failures.size() && i < 3; ++i) text += (i ? "; " : "") + failures[i];
    if (failures.size() > 3) text += "; +" + std::to_string(failures.size() - 3) + " more";
    return text;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

sbp::SpectralReport spectrum_of(const sbp::SbpOperatorPair& op) { return sbp::analyze_spectrum(op, sbp::kDefaultTolerance); }

void criterion_counterexample(Checker& c) {
  const auto op = sbp::build_counterexample();
  const auto report = sbp::verify_all(op);
  for (const auto& r : report.residuals)
    c.require(r.residual < 1e-12, std::string(sbp::to_string(r.property)) + " residual " + num(r.residual));
  c.require(report.nullspace_consistent, "nullspace_consistent false");
  c.require(!report.eigenvalue_property, "eigenvalue_property true");

  const auto spectrum = spectrum_of(op);
  c.require(spectrum.imaginary.size() == 2, "imaginary count " + std::to_string(spectrum.imaginary.size()));
  int plus = 0, minus = 0;
  for (std::size_t idx : spectrum.imaginary) {
    const Complex z = spectrum.pairs[idx].lambda;
    if (std::abs(z - Complex(0, kInvSqrt5)) <= 1e-10) ++plus;
    if (std::abs(z - Complex(0, -kInvSqrt5)) <= 1e-10) ++minus;
  }
  c.require(plus == 1 && minus == 1, "imaginary eigenvalues differ from +-i/sqrt(5)");
}

void criterion_imaginary_modes(Checker& c) {
  const auto op = sbp::build_counterexample();
  const auto spectrum = spectrum_of(op);
  c.require(!spectrum.imaginary.empty(), "no imaginary eigenpairs");
  const double tiny = 1e-10;
  for (std::size_t idx : spectrum.imaginary) {
    const auto& p = spectrum.pairs[idx];
    const double w2 = p.w.norm();
    const double wh = sbp::h_norm(p.w, op.h);
    c.require(std::abs(op.p0.cast<Complex>().dot(p.w)) <= tiny * w2, "|p0^T w|");
    c.require(std::abs(op.pn.cast<Complex>().dot(p.w)) <= tiny * w2, "|pn^T w|");
    c.require((op.s.cast<Complex>() * p.w).cwiseAbs().maxCoeff() <= tiny * w2, "|S w|");
    for (int j = 0; j <= 1; ++j) {
      const sbp::CVector xj = sbp::monomial(op.x, j).cast<Complex>();
      c.require(std::abs(sbp::h_inner(xj, p.w, op.h)) <= tiny * wh, "<x^" + std::to_string(j) + ", w>_H");
    }
    for (std::size_t k = 0; k < spectrum.pairs.size(); ++k) {
      const auto& v = spectrum.pairs[k];
      if (std::abs(v.lambda - p.lambda) <= 1e-8) continue;
      const double cosine = std::abs(sbp::h_inner(p.w, v.w, op.h)) / (wh * sbp::h_norm(v.w, op.h));
      c.require(cosine <= 1e-8, "H-orthogonality " + num(cosine));
    }
    // Geometric multiplicity from the rank of (D~ - lambda I), independent of the decomposition bookkeeping.
    const sbp::CMatrix shifted = spectrum.d_tilde.cast<Complex>() - p.lambda * sbp::CMatrix::Identity(6, 6);
    Eigen::JacobiSVD<sbp::CMatrix> svd(shifted);
    const auto s = svd.singularValues();
    int null_dim = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) <= 1e-8 * s(0)) ++null_dim;
    int algebraic = 0;
    for (const auto& v : spectrum.pairs)
      if (std::abs(v.lambda - p.lambda) <= 1e-8) ++algebraic;
    c.require(null_dim == algebraic, "geometric " + std::to_string(null_dim) + " != algebraic " + std::to_string(algebraic));
  }
}

void criterion_repair(Checker& c) {
  const auto op = sbp::build_counterexample();
  const auto before = spectrum_of(op);
  for (double eps : {1e-2, 1e-6, 1e-10}) {
    const std::string tag = "eps=" + num(eps) + ": ";
    const auto result = sbp::repair_operator(op, eps);
    const auto& repaired = result.op;

    // The smallest shift is eps/2, below the 1e-10 band for eps = 1e-10; the
    // verdict uses the tightest supported tolerance.
    const auto verdict = sbp::verify_all(repaired, 1e-13);
    c.require(verdict.eigenvalue_property, tag + "eigenvalue_property false, min Re " + num(verdict.min_real_part));

    const double change = (repaired.d_plus - op.d_plus).norm();
    c.require(change <= eps * (1 + 1e-14), tag + "|D+' - D+|_F = " + num(change));

    const auto acc = sbp::check_accuracy(repaired, 1);
    for (const auto& row : acc.rows) {
      c.require(row.d_plus < 1e-10 && row.d_minus < 1e-10 && row.p0 < 1e-10 && row.pn < 1e-10,
                tag + "accuracy j=" + std::to_string(row.j));
    }

    const auto after = spectrum_of(repaired);
    c.require(after.pairs.size() == before.pairs.size(), tag + "spectrum size");
    std::vector<bool> used(after.pairs.size(), false);
    for (std::size_t i = 0; i < before.pairs.size(); ++i) {
      const auto& old = before.pairs[i];
      Complex expected = old.lambda;
      double budget = 1e-8 * before.scale;
      if (old.classification == sbp::EigenClass::imaginary) {
        // Predicted shift from the plan's H-normalized mode.
        double shift = -1.0;
        for (std::size_t k = 0; k < result.plan.modes.size(); ++k) {
          if (std::abs(result.plan.modes[k].lambda - old.lambda) <= 1e-8) {
            const double wh = sbp::h_norm(result.plan.modes[k].w, op.h);
            shift = result.plan.epsilons[k / 2] / 2 * wh * wh;
          }
        }
        c.require(shift > 0, tag + "no mode for imaginary eigenvalue");
        expected = Complex(shift, old.lambda.imag());
        budget = 1e-8;
      }
      std::size_t best = 0;
      double best_dist = INFINITY;
      for (std::size_t k = 0; k < after.pairs.size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(after.pairs[k].lambda - expected);
        if (d < best_dist) best_dist = d, best = k;
      }
      used[best] = true;
      c.require(best_dist <= budget, tag + "eigenvalue " + num(old.lambda.real()) + "+" + num(old.lambda.imag()) +
                                         "i moved by " + num(best_dist));
    }

    const sbp::Matrix& s = repaired.s;
    c.require((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0, tag + "S + S' not symmetric");
    c.require(sbp::min_symmetric_eigenvalue(s) >= -1e-14 * std::max(1.0, s.norm()), tag + "S + S' indefinite");
    c.require(sbp::max_abs(sbp::Vector(s * sbp::Vector::Ones(6))) < 1e-10, tag + "S 1 != 0");
    c.require(sbp::max_abs(sbp::Vector(s * op.p0)) < 1e-10 && sbp::max_abs(sbp::Vector(s * op.pn)) < 1e-10,
              tag + "S p != 0");
  }
}

// Rejection test for random node sets: interpolatory weights must be positive.
bool positive_weights(const sbp::Vector& x) {
  try {
    return sbp::build_interpolatory_h(x, sbp::Interval(-1, 1)).weights.minCoeff() > 0.0;
  } catch (const sbp::Error& e) {
    if (e.code() != sbp::ErrorCode::indefinite_norm) throw;
    return false;
  }
}

std::vector<NodeFamily> random_four_node_sets(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<NodeFamily> families;
  while (static_cast<int>(families.size()) < count) {
    sbp::Vector x(4);
    for (int i = 0; i < 4; ++i) x(i) = u(rng);
    std::sort(x.data(), x.data() + 4);
    bool distinct = true;
    for (int i = 0; i < 3; ++i) distinct = distinct && x(i + 1) - x(i) > 1e-6;
    if (!distinct) continue;
    if (!positive_weights(x)) continue;
    families.push_back(NodeFamily::explicit_nodes(x, Interval(-1, 1)));
  }
  return families;
}

void criterion_pseudospectral_sweep(Checker& c) {
  std::vector<NodeFamily> families;
  for (int n = 1; n <= 8; ++n)
    for (const Interval iv : {Interval(-1, 1), Interval(0, 2.7)}) {
      families.push_back(NodeFamily::legendre_gauss_lobatto(n, iv));
      families.push_back(NodeFamily::chebyshev_gauss_lobatto(n, iv));
    }
  for (auto& f : random_four_node_sets(100, 20240607)) families.push_back(std::move(f));

  const auto report = sbp::certify_node_sets(families, 1e-8);
  for (const auto& e : report.entries) {
    if (!e.constructed) {
      c.require(false, e.label + ": " + e.error);
      continue;
    }
    c.require(e.definition_passed, e.label + ": definition residuals");
    c.require(e.ones_residual <= e.tolerance, e.label + ": |D+ 1| = " + num(e.ones_residual));
    c.require(e.rank == e.n, e.label + ": rank " + std::to_string(e.rank));
    c.require(e.min_real_part > e.band, e.label + ": min Re " + num(e.min_real_part));
    c.require(e.certified, e.label + ": not certified");
  }
  c.require(report.entries.size() == 132, "bundle count " + std::to_string(report.entries.size()));
}

void criterion_uniqueness(Checker& c) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& family : {NodeFamily::legendre_gauss_lobatto(n, Interval(-1, 1)),
                               NodeFamily::chebyshev_gauss_lobatto(n, Interval(-1, 1))}) {
      const sbp::Matrix bary = sbp::build_pseudospectral_d(family.nodes);
      const sbp::Matrix ref = oracle::vandermonde_derivative(family.nodes);
      const double gap = (bary - ref).cwiseAbs().maxCoeff();
      c.require(gap <= 1e-8 * bary.cwiseAbs().maxCoeff(), family.label() + ": gap " + num(gap));
    }
  }
  const auto op = sbp::build_pseudospectral_operator(NodeFamily::legendre_gauss_lobatto(2, Interval(-1, 1)));
  sbp::Matrix d(3, 3);
  d << -1.5, 2, -0.5, -0.5, 0, 0.5, 0.5, -2, 1.5;
  sbp::Matrix h = sbp::Matrix::Zero(3, 3);
  h.diagonal() << 1.0 / 3, 4.0 / 3, 1.0 / 3;
  c.require((op.d_plus - d).cwiseAbs().maxCoeff() <= 1e-12, "LGL n=2 D");
  c.require((op.h - h).cwiseAbs().maxCoeff() <= 1e-12, "LGL n=2 H");
}

void criterion_exactness(Checker& c) {
  const std::vector<sbp::SbpOperatorPair> ops = {
      sbp::build_two_point(), sbp::build_classical_fd(64, Interval(0, 1)), sbp::build_counterexample(),
      sbp::build_pseudospectral_operator(NodeFamily::legendre_gauss_lobatto(4, Interval(-1, 1)))};
  for (const auto& op : ops) {
    const double err = sbp::polynomial_exactness_check(op, {20, -1, 20240607});
    c.require(err <= 1e-9, op.name + ": error " + num(err));
  }
  const double over = sbp::polynomial_exactness_check(sbp::build_counterexample(), {20, 2, 20240607});
  c.require(over > 1e-3, "counterexample degree 2 error only " + num(over));
}

void criterion_convergence(Checker& c) {
  const auto study = sbp::convergence_study([](int n) { return sbp::build_classical_fd(n, Interval(0, 1)); },
                                            [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); },
                                            {32, 64, 128, 256});
  c.require(!study.saturated, "saturated");
  c.require(study.least_squares_order >= 1.9, "least-squares order " + num(study.least_squares_order));
}

bool bit_equal(const sbp::SbpOperatorPair& a, const sbp::SbpOperatorPair& b) {
  return a.name == b.name && a.q == b.q && a.interval.a() == b.interval.a() && a.interval.b() == b.interval.b() &&
         a.d_plus == b.d_plus && a.d_minus == b.d_minus && a.h == b.h && a.s == b.s && a.p0 == b.p0 && a.pn == b.pn &&
         a.x == b.x;
}

void criterion_round_trip(Checker& c) {
  std::vector<sbp::SbpOperatorPair> ops = {sbp::build_counterexample(), sbp::build_two_point()};
  for (int n : {2, 3, 16, 64, 256}) ops.push_back(sbp::build_classical_fd(n, Interval(0, 1)));
  ops.push_back(sbp::build_classical_fd(10, Interval(-0.3, 2.7)));
  ops.push_back(sbp::repair_operator(sbp::build_counterexample(), 1e-6).op);
  ops.push_back(sbp::build_pseudospectral_operator(NodeFamily::chebyshev_gauss_lobatto(7, Interval(0, 2.7))));
  const auto path = std::filesystem::temp_directory_path() / "sbp_acceptance_roundtrip.json";
  for (const auto& op : ops) {
    c.require(bit_equal(op, sbp::parse_operator(sbp::dump_operator(op))), op.name + ": string round trip");
    sbp::save_operator(op, path);
    c.require(bit_equal(op, sbp::load_operator(path)), op.name + ": file round trip");
  }
  std::filesystem::remove(path);

  const std::vector<std::vector<std::string>> commands = {
      {"verify", "--builtin", "counterexample"},
      {"verify", "--builtin", "two_point", "--format", "text"},
      {"spectrum", "--builtin", "counterexample"},
      {"repair", "--builtin", "counterexample", "--target-eps", "1e-6"},
      {"pseudospectral", "--family", "lgl", "--n", "5", "--certify"},
      {"solve", "--builtin", "classical_fd:32", "--f", "cos"},
      {"converge", "--grids", "32,64,128,256", "--function", "sin"},
      {"demo"},
  };
  for (const auto& args : commands) {
    std::string first;
    for (int rep = 0; rep < 3; ++rep) {
      std::ostringstream out, err;
      const int status = sbp::cli::run(args, out, err);
      c.require(status == 0, args.front() + ": exit " + std::to_string(status) + " " + err.str());
      if (rep == 0)
        first = out.str();
      else
        c.require(out.str() == first, args.front() + ": output differs between runs");
    }
  }
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Checker&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "counterexample regression", 0.1, criterion_counterexample},
      {2, "imaginary eigenpair properties", 0.1, criterion_imaginary_modes},
      {3, "repair of imaginary eigenvalues", 0.5, criterion_repair},
      {4, "collocation operator sweep", 5.0, criterion_pseudospectral_sweep},
      {5, "barycentric versus Vandermonde", -1.0, criterion_uniqueness},
      {6, "SAT polynomial exactness", 1.0, criterion_exactness},
      {7, "classical convergence order", 1.0, criterion_convergence},
      {8, "round trip and determinism", -1.0, criterion_round_trip},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(checker);
    } catch (const std::exception& e) {
      checker.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.budget_seconds > 0 && seconds >= criterion.budget_seconds)
      checker.require(false, "runtime " + num(seconds) + " s over " + num(criterion.budget_seconds) + " s");
    const bool ok = checker.failures.empty();
    if (!ok) ++failed;
    std::printf("%s  criterion %d  %-34s %8.4f s%s%s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name.c_str(), seconds,
                ok ? "" : "  ", checker.summary().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
