#pragma once

#include "sbp/operator.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace sbp {

enum class EigenClass { positive_real_part, imaginary, negative_real_part };

std::string_view to_string(EigenClass c);

/// Eigenpair of the SAT-augmented matrix together with its H-norm.
struct HEigenPair {
  Complex lambda;
  CVector w;  // unit 2-norm, largest component real and positive
  EigenClass classification = EigenClass::positive_real_part;
  double h_norm = 0.0;
  int algebraic_multiplicity = 1;
  int geometric_multiplicity = 1;
};

/// Eigenvalues closer than this (relative to the Frobenius norm of the
/// matrix) are treated as one eigenvalue.
inline constexpr double kClusterTolerance = 1e-8;

/// D+ + H^{-1} p0 p0^T. Diagonal H is applied entrywise; dense H through a solve.
Matrix build_d_tilde(const SbpOperatorPair& op);

/// All eigenpairs of a real square matrix, sorted by (Re, Im).
///
/// Complex eigenvalues are computed for Im > 0 only and their conjugate
/// partners are synthesized, so the spectrum is exactly conjugate-closed.
/// For a cluster of k eigenvalues the eigenvector basis comes from the
/// numerical nullspace of (A - lambda I); a cluster with geometric
/// multiplicity g < k carries g nullspace vectors and k - g raw eigensolver
/// vectors. `h` (identity when omitted) only feeds `h_norm`. Pairs are
/// classified against the default tolerance band.
std::vector<HEigenPair> eigen_decompose(const Matrix& a);
std::vector<HEigenPair> eigen_decompose(const Matrix& a, const Matrix& h);

/// f^* H g.
Complex h_inner(const CVector& f, const CVector& g, const Matrix& h);
double h_norm(const CVector& f, const Matrix& h);

struct SpectralClassification {
  std::vector<HEigenPair> pairs;
  double band = 0.0;  // |Re lambda| <= band counts as imaginary
  /// (index with Im > 0, index of its conjugate partner), one entry per pair.
  std::vector<std::pair<std::size_t, std::size_t>> conjugate_pairs;
  int m = 0;
  int zero_count = 0;  // imaginary-classified eigenvalues with |lambda| in the band
  int negative_count = 0;
};

/// Classifies each eigenvalue by the band tau_eig * scale and matches every
/// non-zero imaginary eigenvalue with its nearest conjugate partner. Zero
/// eigenvalues are classified imaginary but are not paired. Throws a pairing
/// error when a non-zero imaginary eigenvalue has no partner.
SpectralClassification classify_and_pair(std::vector<HEigenPair> pairs, double tau_eig, double scale);

struct BoundaryResidual {
  double p0 = 0.0;  // |p0^T w|
  double pn = 0.0;  // |pn^T w|
  double s = 0.0;   // max |S w|
};

struct SpectralReport {
  Matrix d_tilde;
  double scale = 0.0;  // Frobenius norm of d_tilde
  double tau_eig = 0.0;
  double band = 0.0;
  std::vector<HEigenPair> pairs;
  std::vector<std::pair<std::size_t, std::size_t>> conjugate_pairs;
  int m = 0;
  int zero_count = 0;
  std::vector<std::size_t> imaginary;       // indices into pairs
  std::vector<BoundaryResidual> boundary_residuals;   // parallel to `imaginary`
  std::vector<std::vector<double>> moment_residuals;  // parallel to `imaginary`, j = 0..q
  /// max |<w, v>| / (|w|_H |v|_H) over imaginary w and eigenvectors v of other eigenvalues.
  double orthogonality_defect = 0.0;
  /// Geometric multiplicity equals algebraic multiplicity for every imaginary eigenvalue.
  bool imaginary_normal = true;
  /// Eigenvalues with Re < -band; the SBP structure forbids them.
  std::vector<std::size_t> negative_real_violations;

  double min_real_part() const;
};

SpectralReport analyze_spectrum(const SbpOperatorPair& op, double tau_eig);

struct ImaginaryMode {
  Complex lambda;
  CVector w;
};

/// H-orthonormal eigenvectors for the imaginary eigenvalues, ordered as
/// w1, conj(w1), w2, conj(w2), ... Modified Gram-Schmidt in the H inner
/// product is applied inside each imaginary eigenspace; orthogonality
/// across distinct eigenvalues is checked to 1e-8 and reported as a contract
/// error when it fails.
std::vector<ImaginaryMode> orthogonalize_imaginary(const SpectralReport& report, const Matrix& h);

/// (|p0^T w|, |pn^T w|, max|S w|) for an imaginary-classified pair.
BoundaryResidual probe_boundary_residual(const SbpOperatorPair& op, const HEigenPair& pair);

/// |<x^j, w>| for j = 0..q, for an imaginary-classified pair.
std::vector<double> probe_moment_residuals(const SbpOperatorPair& op, const HEigenPair& pair);

}  // namespace sbp
