#pragma once

// Dense linear-algebra vocabulary shared by every module.

#include <Eigen/Dense>

#include <complex>
#include <limits>

namespace sbp {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

/// Default verification tolerance: absolute for residuals, relative to the
/// Frobenius norm for spectral decisions.
inline constexpr double kDefaultTolerance = 1e-10;

/// Elementwise power x^j with the convention x^0 = 1 and x^(-1) = 0.
Vector monomial(const Vector& x, int j);

double max_abs(const Matrix& m);
double max_abs(const Vector& v);

bool is_diagonal(const Matrix& m);

/// Rank cut-off sigma_max * size * u * 64.
double rank_threshold(double sigma_max, Index size);

Vector singular_values(const Matrix& m);

/// Number of singular values above rank_threshold.
Index numerical_rank(const Matrix& m);

/// Smallest eigenvalue of (m + m^T) / 2.
double min_symmetric_eigenvalue(const Matrix& m);

/// Solves H y = rhs. Diagonal H is inverted entrywise; otherwise an LU with
/// full pivoting is used. Throws singular_norm when H is numerically singular.
Matrix solve_norm(const Matrix& h, const Matrix& rhs);
Vector solve_norm(const Matrix& h, const Vector& rhs);

double spectral_norm(const Matrix& m);

}  // namespace sbp
