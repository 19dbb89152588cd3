#include "sbp/spectral.hpp"

#include "sbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sbp {

namespace {

constexpr const char* kModule = "spectral";

// Unit 2-norm with the first largest-magnitude component made real positive.
CVector canonical(CVector w) {
  const double nrm = w.norm();
  if (nrm == 0.0) return w;
  w /= nrm;
  Index pivot = 0;
  double best = -1.0;
  for (Index i = 0; i < w.size(); ++i) {
    // Ties within roundoff are common for symmetric eigenvectors; prefer the first.
    const double mag = std::abs(w(i));
    if (mag > best * (1.0 + 1e-12)) {
      best = mag;
      pivot = i;
    }
  }
  const Complex phase = std::conj(w(pivot)) / std::abs(w(pivot));
  w *= phase;
  w(pivot) = Complex(std::abs(w(pivot)), 0.0);
  return w;
}

struct Cluster {
  std::vector<Index> members;  // indices into the raw eigenvalue list
  Complex center;
  bool real = false;
};

EigenClass classify(Complex lambda, double band) {
  if (lambda.real() > band) return EigenClass::positive_real_part;
  if (lambda.real() < -band) return EigenClass::negative_real_part;
  return EigenClass::imaginary;
}

std::vector<Cluster> cluster_eigenvalues(const CVector& ev, double tol) {
  std::vector<Cluster> clusters;
  std::vector<Index> order(static_cast<std::size_t>(ev.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index l, Index r) {
    if (ev(l).real() != ev(r).real()) return ev(l).real() < ev(r).real();
    return ev(l).imag() < ev(r).imag();
  });

  auto assign = [&](Index idx, bool real_set) {
    for (auto& c : clusters) {
      if (c.real == real_set && std::abs(ev(c.members.front()) - ev(idx)) <= tol) {
        c.members.push_back(idx);
        return;
      }
    }
    clusters.push_back(Cluster{{idx}, {}, real_set});
  };

  for (Index idx : order) {
    if (ev(idx).imag() == 0.0) assign(idx, true);
    else if (ev(idx).imag() > 0.0) assign(idx, false);
  }

  for (auto& c : clusters) {
    Complex sum = 0.0;
    for (Index idx : c.members) sum += ev(idx);
    c.center = sum / static_cast<double>(c.members.size());
  }

  // A complex cluster hugging the real axis is one real eigenvalue together
  // with its conjugate; fold both halves into a real cluster.
  for (auto& c : clusters) {
    if (!c.real && c.center.imag() <= tol) {
      const std::size_t half = c.members.size();
      for (std::size_t k = 0; k < half; ++k) {
        const Complex partner = std::conj(ev(c.members[k]));
        for (Index idx = 0; idx < ev.size(); ++idx) {
          if (ev(idx).imag() < 0.0 && ev(idx) == partner &&
              std::find(c.members.begin(), c.members.end(), idx) == c.members.end()) {
            c.members.push_back(idx);
            break;
          }
        }
      }
      c.real = true;
      c.center = Complex(c.center.real(), 0.0);
    }
  }
  return clusters;
}

template <typename Mat>
std::vector<CVector> nullspace_basis(const Mat& shifted, double spread, int max_dim) {
  Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Index size = shifted.cols();
  const double threshold = std::max(rank_threshold(sv(0), size), 4.0 * spread);
  int dim = 0;
  for (Index i = size - 1; i >= 0 && sv(i) <= threshold; --i) ++dim;
  dim = std::clamp(dim, 1, max_dim);
  std::vector<CVector> basis;
  for (int k = 0; k < dim; ++k) basis.push_back(svd.matrixV().col(size - 1 - k).template cast<Complex>());
  return basis;
}

}  // namespace

std::string_view to_string(EigenClass c) {
  switch (c) {
    case EigenClass::positive_real_part: return "positive_real_part";
    case EigenClass::imaginary: return "imaginary";
    case EigenClass::negative_real_part: return "negative_real_part";
  }
  return "positive_real_part";
}

Matrix build_d_tilde(const SbpOperatorPair& op) {
  const Index size = op.d_plus.rows();
  if (op.h.rows() != size || op.p0.size() != size) {
    throw Error(ErrorCode::shape, kModule, "D_plus, H and p0 do not conform");
  }
  const Vector weighted = solve_norm(op.h, op.p0);
  return op.d_plus + weighted * op.p0.transpose();
}

Complex h_inner(const CVector& f, const CVector& g, const Matrix& h) {
  if (f.size() != g.size() || h.rows() != f.size() || h.cols() != f.size()) {
    throw Error(ErrorCode::shape, kModule,
                "inner product operands have lengths " + std::to_string(f.size()) + " and " +
                    std::to_string(g.size()) + " against a " + std::to_string(h.rows()) + "x" +
                    std::to_string(h.cols()) + " norm");
  }
  const CVector hg = h.cast<Complex>() * g;
  return f.dot(hg);  // dot conjugates its left operand
}

double h_norm(const CVector& f, const Matrix& h) { return std::sqrt(std::max(0.0, h_inner(f, f, h).real())); }

std::vector<HEigenPair> eigen_decompose(const Matrix& a) {
  return eigen_decompose(a, Matrix::Identity(a.rows(), a.cols()));
}

std::vector<HEigenPair> eigen_decompose(const Matrix& a, const Matrix& h) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::shape, kModule, "eigendecomposition needs a square matrix");
  const Index size = a.rows();
  if (size == 0) return {};
  if (!a.allFinite()) throw Error(ErrorCode::decomposition, kModule, "matrix has non-finite entries");

  const Eigen::MatrixXd dense = a;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::decomposition, kModule, "QR iteration failed to converge");
  }
  const CVector ev = solver.eigenvalues();
  const CMatrix raw = solver.eigenvectors();

  const double scale = a.norm();
  const double cluster_tol = std::max(kClusterTolerance * scale, std::numeric_limits<double>::min());
  const double band = kDefaultTolerance * scale;

  std::vector<HEigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(size));
  for (const Cluster& c : cluster_eigenvalues(ev, cluster_tol)) {
    const int k = static_cast<int>(c.members.size());
    double spread = 0.0;
    for (Index idx : c.members) spread = std::max(spread, std::abs(ev(idx) - c.center));

    std::vector<CVector> basis;
    if (k == 1) {
      basis.push_back(raw.col(c.members.front()));
    } else if (c.real) {
      const Eigen::MatrixXd shifted = dense - c.center.real() * Eigen::MatrixXd::Identity(size, size);
      basis = nullspace_basis(shifted, spread, k);
    } else {
      const CMatrix shifted = dense.cast<Complex>() - c.center * CMatrix::Identity(size, size);
      basis = nullspace_basis(shifted, spread, k);
    }
    const int geometric = static_cast<int>(basis.size());
    for (int extra = geometric; extra < k; ++extra) basis.push_back(raw.col(c.members[static_cast<std::size_t>(extra)]));

    for (CVector& w : basis) {
      if (c.real) w = w.real().cast<Complex>();
      HEigenPair pair;
      pair.lambda = c.center;
      pair.w = canonical(w);
      pair.algebraic_multiplicity = k;
      pair.geometric_multiplicity = geometric;
      pairs.push_back(pair);
      if (!c.real) {
        HEigenPair partner = pair;
        partner.lambda = std::conj(pair.lambda);
        partner.w = pair.w.conjugate();
        pairs.push_back(std::move(partner));
      }
    }
  }

  if (static_cast<Index>(pairs.size()) != size) {
    throw Error(ErrorCode::decomposition, kModule,
                "recovered " + std::to_string(pairs.size()) + " eigenpairs for a matrix of size " +
                    std::to_string(size));
  }

  for (HEigenPair& p : pairs) {
    p.h_norm = h_norm(p.w, h);
    p.classification = classify(p.lambda, band);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const HEigenPair& l, const HEigenPair& r) {
    if (l.lambda.real() != r.lambda.real()) return l.lambda.real() < r.lambda.real();
    return l.lambda.imag() < r.lambda.imag();
  });
  return pairs;
}

SpectralClassification classify_and_pair(std::vector<HEigenPair> pairs, double tau_eig, double scale) {
  SpectralClassification out;
  out.band = tau_eig * scale;
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    HEigenPair& p = pairs[i];
    p.classification = classify(p.lambda, out.band);
    if (p.classification == EigenClass::negative_real_part) ++out.negative_count;
    if (p.classification != EigenClass::imaginary) continue;
    if (std::abs(p.lambda.imag()) <= out.band) {
      ++out.zero_count;
    } else if (p.lambda.imag() > 0.0) {
      upper.push_back(i);
    } else {
      lower.push_back(i);
    }
  }

  std::vector<bool> used(pairs.size(), false);
  for (std::size_t i : upper) {
    const Complex target = std::conj(pairs[i].lambda);
    std::size_t best = pairs.size();
    double best_dist = 0.0;
    for (std::size_t j : lower) {
      if (used[j]) continue;
      const double dist = std::abs(pairs[j].lambda - target);
      if (best == pairs.size() || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == pairs.size()) {
      throw Error(ErrorCode::pairing, kModule,
                  "imaginary eigenvalue " + std::to_string(pairs[i].lambda.real()) + "+" +
                      std::to_string(pairs[i].lambda.imag()) + "i has no conjugate partner");
    }
    used[best] = true;
    out.conjugate_pairs.emplace_back(i, best);
  }
  for (std::size_t j : lower) {
    if (!used[j]) {
      throw Error(ErrorCode::pairing, kModule, "odd count of non-zero imaginary eigenvalues");
    }
  }
  out.m = static_cast<int>(out.conjugate_pairs.size());
  out.pairs = std::move(pairs);
  return out;
}

double SpectralReport::min_real_part() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) best = std::min(best, p.lambda.real());
  return best;
}

BoundaryResidual probe_boundary_residual(const SbpOperatorPair& op, const HEigenPair& pair) {
  if (pair.classification != EigenClass::imaginary) {
    throw Error(ErrorCode::contract, kModule, "boundary probe requires an imaginary-classified eigenpair");
  }
  const CVector& w = pair.w;
  BoundaryResidual r;
  r.p0 = std::abs(op.p0.cast<Complex>().dot(w));
  r.pn = std::abs(op.pn.cast<Complex>().dot(w));
  const CVector sw = op.s.cast<Complex>() * w;
  r.s = sw.size() == 0 ? 0.0 : sw.cwiseAbs().maxCoeff();
  return r;
}

std::vector<double> probe_moment_residuals(const SbpOperatorPair& op, const HEigenPair& pair) {
  if (pair.classification != EigenClass::imaginary) {
    throw Error(ErrorCode::contract, kModule, "grid-orthogonality probe requires an imaginary-classified eigenpair");
  }
  std::vector<double> out;
  for (int j = 0; j <= op.q; ++j) {
    out.push_back(std::abs(h_inner(monomial(op.x, j).cast<Complex>(), pair.w, op.h)));
  }
  return out;
}

SpectralReport analyze_spectrum(const SbpOperatorPair& op, double tau_eig) {
  SpectralReport report;
  report.d_tilde = build_d_tilde(op);
  report.scale = report.d_tilde.norm();
  report.tau_eig = tau_eig;

  SpectralClassification cls = classify_and_pair(eigen_decompose(report.d_tilde, op.h), tau_eig, report.scale);
  report.band = cls.band;
  report.pairs = std::move(cls.pairs);
  report.conjugate_pairs = std::move(cls.conjugate_pairs);
  report.m = cls.m;
  report.zero_count = cls.zero_count;

  const double cluster_tol = kClusterTolerance * report.scale;
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const HEigenPair& p = report.pairs[i];
    if (p.classification == EigenClass::negative_real_part) report.negative_real_violations.push_back(i);
    if (p.classification != EigenClass::imaginary) continue;
    report.imaginary.push_back(i);
    report.boundary_residuals.push_back(probe_boundary_residual(op, p));
    report.moment_residuals.push_back(probe_moment_residuals(op, p));
    if (p.geometric_multiplicity != p.algebraic_multiplicity) report.imaginary_normal = false;
    for (std::size_t j = 0; j < report.pairs.size(); ++j) {
      const HEigenPair& v = report.pairs[j];
      if (std::abs(v.lambda - p.lambda) <= cluster_tol) continue;
      const double denom = p.h_norm * v.h_norm;
      if (denom == 0.0) continue;
      report.orthogonality_defect = std::max(report.orthogonality_defect, std::abs(h_inner(p.w, v.w, op.h)) / denom);
    }
  }
  return report;
}

std::vector<ImaginaryMode> orthogonalize_imaginary(const SpectralReport& report, const Matrix& h) {
  if (report.conjugate_pairs.empty()) {
    throw Error(ErrorCode::contract, kModule, "no imaginary eigenpairs to orthogonalize");
  }
  const double cluster_tol = kClusterTolerance * report.scale;

  // Group the Im > 0 representatives into eigenspaces.
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& [upper, lower] : report.conjugate_pairs) {
    (void)lower;
    bool placed = false;
    for (auto& g : groups) {
      if (std::abs(report.pairs[g.front()].lambda - report.pairs[upper].lambda) <= cluster_tol) {
        g.push_back(upper);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({upper});
  }

  std::vector<ImaginaryMode> modes;
  for (const auto& g : groups) {
    const Complex lambda = report.pairs[g.front()].lambda;
    std::vector<CVector> basis;
    for (std::size_t idx : g) {
      CVector v = report.pairs[idx].w;
      const double original = h_norm(v, h);
      for (const CVector& u : basis) v -= h_inner(u, v, h) * u;
      const double remaining = h_norm(v, h);
      if (remaining < 1e-12 * std::max(original, 1.0)) {
        throw Error(ErrorCode::degenerate_eigenspace, kModule,
                    "eigenvectors for lambda = " + std::to_string(lambda.real()) + "+" +
                        std::to_string(lambda.imag()) + "i are linearly dependent");
      }
      basis.push_back(v / remaining);
    }
    for (const CVector& u : basis) {
      modes.push_back({lambda, u});
      modes.push_back({std::conj(lambda), u.conjugate()});
    }
  }

  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (std::abs(modes[i].lambda - modes[j].lambda) <= cluster_tol) continue;
      const double overlap = std::abs(h_inner(modes[i].w, modes[j].w, h));
      if (overlap > 1e-8) {
        throw Error(ErrorCode::contract, kModule,
                    "imaginary eigenvectors of distinct eigenvalues are not H-orthogonal (overlap " +
                        std::to_string(overlap) + ")");
      }
    }
  }
  return modes;
}

}  // namespace sbp
