#pragma once

#include <Eigen/Dense>

namespace hullcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Relative rank tolerance used wherever a kernel or nullspace is taken.
inline constexpr double kRankTolerance = 1e-8;

/// Orthonormal basis of a linear subspace of R^d, one column per direction.
/// The zero subspace is represented by a d x 0 matrix.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  explicit SubspaceBasis(int ambient);
  /// Takes ownership of columns that are already orthonormal.
  SubspaceBasis(int ambient, Matrix orthonormal_columns);

  static SubspaceBasis full(int ambient);
  /// Orthonormal basis of the column span of `vectors` (d x k).
  static SubspaceBasis span_of(const Matrix& vectors,
                               double tol = kRankTolerance);

  int ambient() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  bool trivial() const { return dim() == 0; }
  const Matrix& basis() const { return basis_; }
  Vector column(int i) const { return basis_.col(i); }

  Matrix projector() const;
  SubspaceBasis complement(double tol = kRankTolerance) const;
  /// Distance from v to the subspace relative to max(1, |v|).
  double residual(const Vector& v) const;

 private:
  int ambient_ = 0;
  Matrix basis_;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal, column i pairs with values(i)
};

/// Throws std::invalid_argument when the input is not symmetric.
EigenDecomposition sym_eig(const Matrix& m);

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm(const Matrix& m);

double min_eig(const Matrix& m);
bool is_psd(const Matrix& m, double tol = kRankTolerance);

/// Span of eigenvectors with |lambda| <= tol * max(1, |M|_2).
SubspaceBasis kernel(const Matrix& m, double tol = kRankTolerance);

/// Orthonormal basis of {z : rows * z = 0}; `rows` is r x ambient and may
/// have zero rows.
SubspaceBasis linear_nullspace(const Matrix& rows, int ambient,
                               double tol = kRankTolerance);

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        double tol = kRankTolerance);

/// Spectral-norm distance between orthogonal projectors.
double projector_distance(const SubspaceBasis& a, const SubspaceBasis& b);

int numerical_rank(const Matrix& m, double tol = kRankTolerance);

double symmetry_defect(const Matrix& m);

}  // namespace linalg
}  // namespace hullcert
