#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hullcert/linalg.hpp"

namespace hullcert {

/// Raised when an operation is called outside the domain its result is
/// defined on (wrong structure, missing assumption witness, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// q(x) = x'Ax + 2b'x + c with A symmetric.
class QuadraticForm {
 public:
  QuadraticForm() = default;
  /// Symmetrizes A; rejects inputs whose relative asymmetry exceeds 1e-12.
  QuadraticForm(Matrix A, Vector b, double c);

  static QuadraticForm zero(int n);

  int dim() const { return static_cast<int>(b_.size()); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double c() const { return c_; }
  double asymmetry() const { return asymmetry_; }

  /// [[c, b'], [b, A]], so that <hom, [[1, x'], [x, X]]> = <A,X> + 2b'x + c.
  Matrix homogenized() const;
  /// max(|A|_F, |b|, |c|).
  double coefficient_norm() const;

  QuadraticForm& operator+=(const QuadraticForm& other);
  QuadraticForm& operator*=(double s);

 private:
  Matrix A_;
  Vector b_;
  double c_ = 0.0;
  double asymmetry_ = 0.0;
};

QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b);
QuadraticForm operator*(double s, QuadraticForm q);

/// x'Ax + 2b'x + c.
double evaluate(const QuadraticForm& q, const Vector& x);

struct Structure {
  enum class Kind { Generic, Diagonal, Kronecker };
  Kind kind = Kind::Generic;
  int r = 0;  // Kronecker block size
  int k = 0;  // Kronecker block count, n = r*k

  static Structure generic() { return {}; }
  static Structure diagonal() { return {Kind::Diagonal, 0, 0}; }
  static Structure kronecker(int r, int k) { return {Kind::Kronecker, r, k}; }
  bool operator==(const Structure&) const = default;
};

std::string to_string(Structure::Kind kind);

/// min q_obj(x) s.t. q_i(x) <= 0, i = 1..m. Form index 0 is the objective
/// and indices 1..m are the constraints; every (1+m)-vector in the library
/// uses this ordering.
class Qcqp {
 public:
  /// The structure tag is verified; when the hint is Generic the structure
  /// is detected.
  Qcqp(QuadraticForm objective, std::vector<QuadraticForm> constraints,
       Structure hint = Structure::generic());

  int n() const { return n_; }
  int m() const { return static_cast<int>(constraints_.size()); }
  const QuadraticForm& objective() const { return objective_; }
  const QuadraticForm& constraint(int i) const { return constraints_.at(i - 1); }
  /// i in [0, m]; 0 is the objective.
  const QuadraticForm& form(int i) const {
    return i == 0 ? objective_ : constraints_.at(i - 1);
  }
  const std::vector<QuadraticForm>& constraints() const { return constraints_; }
  const Structure& structure() const { return structure_; }
  /// max(1, coefficient norms over all forms).
  double scale() const { return scale_; }
  bool objective_is_zero(double tol = 1e-12) const;

 private:
  QuadraticForm objective_;
  std::vector<QuadraticForm> constraints_;
  Structure structure_;
  int n_ = 0;
  double scale_ = 1.0;
};

struct MultiplierPoint {
  double gamma_obj = 0.0;
  Vector gamma;

  /// (gamma_obj, gamma) as one (1+m)-vector.
  Vector stacked() const;
  static MultiplierPoint from_stacked(const Vector& g);
  bool nonnegative(double tol = 0.0) const;
};

struct EpigraphPoint {
  Vector x;
  double t = 0.0;

  Vector stacked() const;  // (x, t)
  static EpigraphPoint from_stacked(const Vector& v);
};

QuadraticForm aggregate(const Qcqp& p, const MultiplierPoint& g);
/// Aggregation with a stacked (1+m)-vector.
QuadraticForm aggregate(const Qcqp& p, const Vector& stacked);
/// A[gamma] = A(1, gamma), likewise b and c.
QuadraticForm aggregate_normalized(const Qcqp& p, const Vector& gamma);
/// [gamma, q(x)] = q_obj(x) + sum_i gamma_i q_i(x).
double lagrangian_value(const Qcqp& p, const Vector& gamma, const Vector& x);

/// All form values (q_obj(x), q_1(x), ..., q_m(x)).
Vector q_values(const Qcqp& p, const Vector& x);
/// q(x) - 2t e_obj.
Vector q_vector(const Qcqp& p, const EpigraphPoint& pt);

struct FeasibilityResidual {
  double violation = 0.0;  // max(q_obj(x) - 2t, max_i q_i(x))
  bool in_s = false;
};

/// Membership in the epigraph S with tolerance tol * (1 + scale).
FeasibilityResidual feasibility_residual(const Qcqp& p, const EpigraphPoint& pt,
                                         double tol = 1e-8);

/// Largest block count k > 1 such that every A_i = I_k (x) A_i', or 0.
int kronecker_blocks(const Qcqp& p, double tol = 1e-12);
bool is_diagonal(const Qcqp& p, double tol = 1e-12);
Structure detect_structure(const Qcqp& p);
bool verify_structure(const Qcqp& p, const Structure& s);
/// Leading r x r block of a Kronecker-structured matrix.
Matrix kronecker_factor(const Matrix& A, int r);

}  // namespace hullcert
