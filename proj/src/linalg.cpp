#include "sbp/linalg.hpp"

#include "sbp/error.hpp"

#include <algorithm>
#include <cmath>

namespace sbp {

namespace {

void require_nonsingular_diagonal(const Matrix& h) {
  const double scale = max_abs(h);
  for (Index i = 0; i < h.rows(); ++i) {
    if (std::abs(h(i, i)) <= scale * static_cast<double>(h.rows()) * kUnitRoundoff || h(i, i) == 0.0) {
      throw Error(ErrorCode::singular_norm, "linalg",
                  "norm matrix has a zero diagonal entry at index " + std::to_string(i));
    }
  }
}

}  // namespace

Vector monomial(const Vector& x, int j) {
  if (j < 0) return Vector::Zero(x.size());
  Vector out = Vector::Ones(x.size());
  for (int k = 0; k < j; ++k) out = out.cwiseProduct(x);
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool is_diagonal(const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

double rank_threshold(double sigma_max, Index size) {
  return sigma_max * static_cast<double>(size) * kUnitRoundoff * 64.0;
}

Vector singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(m)};
  return svd.singularValues();
}

Index numerical_rank(const Matrix& m) {
  const Vector sv = singular_values(m);
  if (sv.size() == 0) return 0;
  const double cut = rank_threshold(sv(0), std::max(m.rows(), m.cols()));
  return static_cast<Index>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > cut; }));
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix solve_norm(const Matrix& h, const Matrix& rhs) {
  if (h.rows() != h.cols() || h.rows() != rhs.rows()) {
    throw Error(ErrorCode::shape, "linalg", "norm matrix and right-hand side do not conform");
  }
  if (is_diagonal(h)) {
    require_nonsingular_diagonal(h);
    Matrix out = rhs;
    for (Index i = 0; i < h.rows(); ++i) out.row(i) /= h(i, i);
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(h)};
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::singular_norm, "linalg", "norm matrix is numerically singular");
  }
  return lu.solve(Eigen::MatrixXd(rhs));
}

Vector solve_norm(const Matrix& h, const Vector& rhs) {
  Matrix col = rhs;
  return solve_norm(h, col).col(0);
}

double spectral_norm(const Matrix& m) {
  const Vector sv = singular_values(m);
  return sv.size() == 0 ? 0.0 : sv(0);
}

}  // namespace sbp
