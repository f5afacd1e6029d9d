#include "hullcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hullcert::linalg {

SubspaceBasis::SubspaceBasis(int ambient)
    : ambient_(ambient), basis_(Matrix::Zero(ambient, 0)) {}

SubspaceBasis::SubspaceBasis(int ambient, Matrix orthonormal_columns)
    : ambient_(ambient), basis_(std::move(orthonormal_columns)) {
  if (basis_.rows() != ambient) {
    throw std::invalid_argument("SubspaceBasis: row count != ambient dim");
  }
}

SubspaceBasis SubspaceBasis::full(int ambient) {
  return SubspaceBasis(ambient, Matrix::Identity(ambient, ambient));
}

SubspaceBasis SubspaceBasis::span_of(const Matrix& vectors, double tol) {
  const int d = static_cast<int>(vectors.rows());
  if (vectors.cols() == 0 || d == 0) return SubspaceBasis(d);
  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return SubspaceBasis(d, svd.matrixU().leftCols(rank));
}

Matrix SubspaceBasis::projector() const {
  return basis_ * basis_.transpose();
}

SubspaceBasis SubspaceBasis::complement(double tol) const {
  return linear_nullspace(basis_.transpose(), ambient_, tol);
}

double SubspaceBasis::residual(const Vector& v) const {
  Vector r = v - basis_ * (basis_.transpose() * v);
  return r.norm() / std::max(1.0, v.norm());
}

double symmetry_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

EigenDecomposition sym_eig(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("sym_eig: matrix is not square");
  }
  if (symmetry_defect(m) > 1e-10) {
    throw std::invalid_argument("sym_eig: matrix is not symmetric");
  }
  if (m.size() == 0) return {Vector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eig(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const Matrix& m, double tol) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) >= -tol * std::max(1.0, norm);
}

SubspaceBasis kernel(const Matrix& m, double tol) {
  const int d = static_cast<int>(m.rows());
  if (d == 0) return SubspaceBasis(0);
  EigenDecomposition eig = sym_eig(m);
  const double norm = eig.values.cwiseAbs().maxCoeff();
  const double cutoff = tol * std::max(1.0, norm);
  std::vector<int> keep;
  for (int i = 0; i < d; ++i) {
    if (std::abs(eig.values(i)) <= cutoff) keep.push_back(i);
  }
  Matrix cols(d, static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) cols.col(j) = eig.vectors.col(keep[j]);
  return SubspaceBasis(d, std::move(cols));
}

SubspaceBasis linear_nullspace(const Matrix& rows, int ambient, double tol) {
  if (rows.rows() == 0) return SubspaceBasis::full(ambient);
  if (rows.cols() != ambient) {
    throw std::invalid_argument("linear_nullspace: column count != ambient");
  }
  if (ambient == 0) return SubspaceBasis(0);
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return SubspaceBasis(ambient, svd.matrixV().rightCols(ambient - rank));
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        double tol) {
  if (a.ambient() != b.ambient()) {
    throw std::invalid_argument("intersect: ambient dimension mismatch");
  }
  const int d = a.ambient();
  Matrix ca = a.complement(tol).basis();
  Matrix cb = b.complement(tol).basis();
  Matrix rows(ca.cols() + cb.cols(), d);
  rows << ca.transpose(), cb.transpose();
  return linear_nullspace(rows, d, tol);
}

double projector_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient() != b.ambient()) {
    throw std::invalid_argument("projector_distance: ambient mismatch");
  }
  if (a.ambient() == 0) return 0.0;
  return spectral_norm(a.projector() - b.projector());
}

int numerical_rank(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv(0));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace hullcert::linalg
