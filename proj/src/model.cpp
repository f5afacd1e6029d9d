#include "hullcert/model.hpp"

#include <algorithm>
#include <cmath>

namespace hullcert {

QuadraticForm::QuadraticForm(Matrix A, Vector b, double c) : c_(c) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw DimensionError("QuadraticForm: A must be n x n and b length n");
  }
  asymmetry_ = linalg::symmetry_defect(A);
  if (asymmetry_ > 1e-12) {
    throw std::invalid_argument("QuadraticForm: A is not symmetric (defect " +
                                std::to_string(asymmetry_) + ")");
  }
  A_ = 0.5 * (A + A.transpose());
  b_ = std::move(b);
}

QuadraticForm QuadraticForm::zero(int n) {
  return QuadraticForm(Matrix::Zero(n, n), Vector::Zero(n), 0.0);
}

Matrix QuadraticForm::homogenized() const {
  const int n = dim();
  Matrix h(n + 1, n + 1);
  h(0, 0) = c_;
  h.block(0, 1, 1, n) = b_.transpose();
  h.block(1, 0, n, 1) = b_;
  h.block(1, 1, n, n) = A_;
  return h;
}

double QuadraticForm::coefficient_norm() const {
  return std::max({A_.norm(), b_.norm(), std::abs(c_)});
}

QuadraticForm& QuadraticForm::operator+=(const QuadraticForm& other) {
  if (other.dim() != dim()) throw DimensionError("QuadraticForm: dim mismatch");
  A_ += other.A_;
  b_ += other.b_;
  c_ += other.c_;
  return *this;
}

QuadraticForm& QuadraticForm::operator*=(double s) {
  A_ *= s;
  b_ *= s;
  c_ *= s;
  return *this;
}

QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) {
  a += b;
  return a;
}

QuadraticForm operator*(double s, QuadraticForm q) {
  q *= s;
  return q;
}

double evaluate(const QuadraticForm& q, const Vector& x) {
  if (x.size() != q.dim()) throw DimensionError("evaluate: dimension mismatch");
  return x.dot(q.A() * x) + 2.0 * q.b().dot(x) + q.c();
}

std::string to_string(Structure::Kind kind) {
  switch (kind) {
    case Structure::Kind::Generic: return "generic";
    case Structure::Kind::Diagonal: return "diagonal";
    case Structure::Kind::Kronecker: return "kronecker";
  }
  return "generic";
}

Qcqp::Qcqp(QuadraticForm objective, std::vector<QuadraticForm> constraints,
           Structure hint)
    : objective_(std::move(objective)), constraints_(std::move(constraints)) {
  n_ = objective_.dim();
  if (constraints_.empty()) {
    throw std::invalid_argument("Qcqp: at least one constraint is required");
  }
  for (const auto& q : constraints_) {
    if (q.dim() != n_) throw DimensionError("Qcqp: forms differ in dimension");
  }
  scale_ = std::max(1.0, objective_.coefficient_norm());
  for (const auto& q : constraints_) scale_ = std::max(scale_, q.coefficient_norm());

  if (hint.kind == Structure::Kind::Generic) {
    structure_ = detect_structure(*this);
  } else {
    if (!verify_structure(*this, hint)) {
      throw std::invalid_argument("Qcqp: structure hint '" +
                                  to_string(hint.kind) +
                                  "' does not hold for the data");
    }
    structure_ = hint;
  }
}

bool Qcqp::objective_is_zero(double tol) const {
  return objective_.coefficient_norm() <= tol * scale_;
}

Vector MultiplierPoint::stacked() const {
  Vector g(1 + gamma.size());
  g(0) = gamma_obj;
  g.tail(gamma.size()) = gamma;
  return g;
}

MultiplierPoint MultiplierPoint::from_stacked(const Vector& g) {
  return {g(0), g.tail(g.size() - 1)};
}

bool MultiplierPoint::nonnegative(double tol) const {
  return gamma_obj >= -tol && (gamma.size() == 0 || gamma.minCoeff() >= -tol);
}

Vector EpigraphPoint::stacked() const {
  Vector v(x.size() + 1);
  v.head(x.size()) = x;
  v(x.size()) = t;
  return v;
}

EpigraphPoint EpigraphPoint::from_stacked(const Vector& v) {
  return {v.head(v.size() - 1), v(v.size() - 1)};
}

QuadraticForm aggregate(const Qcqp& p, const Vector& stacked) {
  if (stacked.size() != p.m() + 1) {
    throw DimensionError("aggregate: multiplier length != 1 + m");
  }
  QuadraticForm sum = stacked(0) * p.objective();
  for (int i = 1; i <= p.m(); ++i) sum += stacked(i) * p.form(i);
  return sum;
}

QuadraticForm aggregate(const Qcqp& p, const MultiplierPoint& g) {
  if (g.gamma.size() != p.m()) {
    throw DimensionError("aggregate: gamma length != m");
  }
  return aggregate(p, g.stacked());
}

QuadraticForm aggregate_normalized(const Qcqp& p, const Vector& gamma) {
  return aggregate(p, MultiplierPoint{1.0, gamma});
}

double lagrangian_value(const Qcqp& p, const Vector& gamma, const Vector& x) {
  return evaluate(aggregate_normalized(p, gamma), x);
}

Vector q_values(const Qcqp& p, const Vector& x) {
  if (x.size() != p.n()) throw DimensionError("q_values: dimension mismatch");
  Vector v(p.m() + 1);
  for (int i = 0; i <= p.m(); ++i) v(i) = evaluate(p.form(i), x);
  return v;
}

Vector q_vector(const Qcqp& p, const EpigraphPoint& pt) {
  Vector v = q_values(p, pt.x);
  v(0) -= 2.0 * pt.t;
  return v;
}

FeasibilityResidual feasibility_residual(const Qcqp& p, const EpigraphPoint& pt,
                                         double tol) {
  const Vector v = q_vector(p, pt);
  const double violation = v.maxCoeff();
  return {violation, violation <= tol * (1.0 + p.scale())};
}

namespace {

bool matrix_is_diagonal(const Matrix& A, double tol) {
  Matrix off = A;
  off.diagonal().setZero();
  return off.norm() <= tol * std::max(1.0, A.norm());
}

bool matrix_is_kronecker(const Matrix& A, int r, double tol) {
  const int n = static_cast<int>(A.rows());
  const int k = n / r;
  Matrix expected = Matrix::Zero(n, n);
  const Matrix block = A.topLeftCorner(r, r);
  for (int j = 0; j < k; ++j) expected.block(j * r, j * r, r, r) = block;
  return (A - expected).norm() <= tol * std::max(1.0, A.norm());
}

}  // namespace

bool is_diagonal(const Qcqp& p, double tol) {
  for (int i = 0; i <= p.m(); ++i) {
    if (!matrix_is_diagonal(p.form(i).A(), tol)) return false;
  }
  return true;
}

int kronecker_blocks(const Qcqp& p, double tol) {
  const int n = p.n();
  for (int k = n; k >= 2; --k) {
    if (n % k != 0) continue;
    const int r = n / k;
    bool ok = true;
    for (int i = 0; i <= p.m() && ok; ++i) {
      ok = matrix_is_kronecker(p.form(i).A(), r, tol);
    }
    if (ok) return k;
  }
  return 0;
}

Matrix kronecker_factor(const Matrix& A, int r) {
  return A.topLeftCorner(r, r);
}

Structure detect_structure(const Qcqp& p) {
  if (is_diagonal(p)) return Structure::diagonal();
  if (int k = kronecker_blocks(p); k > 0) return Structure::kronecker(p.n() / k, k);
  return Structure::generic();
}

bool verify_structure(const Qcqp& p, const Structure& s) {
  switch (s.kind) {
    case Structure::Kind::Generic:
      return true;
    case Structure::Kind::Diagonal:
      return is_diagonal(p);
    case Structure::Kind::Kronecker: {
      if (s.r <= 0 || s.k <= 0 || s.r * s.k != p.n()) return false;
      for (int i = 0; i <= p.m(); ++i) {
        if (!matrix_is_kronecker(p.form(i).A(), s.r, 1e-12)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace hullcert
