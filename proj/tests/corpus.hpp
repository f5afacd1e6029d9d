#pragma once

// Seeded instance generators shared by the unit tests and the acceptance run.

#include <cstdint>
#include <random>
#include <vector>

#include "hullcert/gamma.hpp"
#include "hullcert/model.hpp"
#include "hullcert/sdp.hpp"

namespace corpus {

using hullcert::Matrix;
using hullcert::Qcqp;
using hullcert::QuadraticForm;
using hullcert::Vector;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  Vector vec(int n, double s = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = s * normal();
    return v;
  }
  Matrix sym(int n, double s = 1.0) {
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = normal();
    return 0.5 * s * (M + M.transpose());
  }
  Matrix orthogonal(int n) {
    Matrix G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = normal();
    Eigen::HouseholderQR<Matrix> qr(G);
    return qr.householderQ();
  }
  /// Random orthogonal matrix times diag(lo..hi) spectrum.
  Matrix pd(int n, double lo, double hi) {
    const Matrix Q = orthogonal(n);
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    return Q * d.asDiagonal() * Q.transpose();
  }
};

inline double min_eig(const Matrix& A) { return hullcert::linalg::min_eig(A); }

/// Random QCQP together with points that satisfy every constraint.
struct FeasibleInstance {
  Qcqp problem;
  std::vector<Vector> points;
};

inline FeasibleInstance random_feasible(std::uint64_t seed, int points) {
  Rng r(seed);
  const int n = r.integer(1, 6);
  const int m = r.integer(1, 3);
  std::vector<Vector> xs;
  for (int k = 0; k < points; ++k) xs.push_back(r.vec(n, r.uniform(0.2, 2.0)));
  const QuadraticForm obj(r.sym(n), r.vec(n), r.normal());
  std::vector<QuadraticForm> cons;
  for (int i = 0; i < m; ++i) {
    const Matrix A = r.sym(n);
    const Vector b = r.vec(n);
    double worst = -1e300;
    for (const Vector& x : xs) worst = std::max(worst, x.dot(A * x) + 2.0 * b.dot(x));
    cons.emplace_back(A, b, -worst - r.uniform(0.0, 0.5));
  }
  return {Qcqp(obj, cons), xs};
}

/// One nonconvex constraint or objective with a definite aggregation and
/// x = 0 strictly feasible.
inline Qcqp single_constraint(std::uint64_t seed) {
  Rng r(seed);
  for (;;) {
    const int n = r.integer(1, 5);
    const double g = r.uniform(0.5, 2.0);
    const Matrix P = r.pd(n, 0.5, 2.0);
    Matrix A1;
    if (r.integer(0, 1) == 0) {
      A1 = r.pd(n, 0.5, 2.0);  // convex constraint, TRS-like
    } else {
      A1 = r.sym(n);
    }
    const Matrix A0 = P - g * A1;
    if (min_eig(A0) >= -1e-3 && min_eig(A1) >= -1e-3) continue;
    const QuadraticForm obj(A0, r.vec(n, 0.5), 0.0);
    const QuadraticForm con(A1, r.vec(n, 0.5), -r.uniform(0.5, 1.5));
    return Qcqp(obj, {con});
  }
}

enum class LinearKind { Zero, Shift, Random };

/// q_obj = 0, both constraints nonconvex, a positive definite combination,
/// and a strictly feasible point. The relaxation lies inside [-2.9, 2.9]^n.
inline Qcqp two_constraint(std::uint64_t seed, LinearKind kind) {
  Rng r(seed);
  for (;;) {
    const int n = r.integer(2, 3);
    const Matrix P = r.pd(n, 1.0, 3.0);
    const double g1 = r.uniform(0.3, 2.0), g2 = r.uniform(0.3, 2.0);
    const Matrix A1 = r.sym(n, 1.5);
    const Matrix A2 = (P - g1 * A1) / g2;
    if (min_eig(A1) > -0.1 || min_eig(A2) > -0.1) continue;
    Vector b1 = Vector::Zero(n), b2 = Vector::Zero(n);
    double c1 = -r.uniform(0.5, 1.5), c2 = -r.uniform(0.5, 1.5);
    if (kind == LinearKind::Shift) {
      const Vector z = r.vec(n, 0.3);
      b1 = A1 * z;
      b2 = A2 * z;
      c1 += z.dot(A1 * z);
      c2 += z.dot(A2 * z);
    } else if (kind == LinearKind::Random) {
      b1 = r.vec(n);
      b1 *= r.uniform(0.5, 1.2) / b1.norm();
      b2 = r.vec(n);
      b2 *= r.uniform(0.0, 1.2) / std::max(1e-9, b2.norm());
    }
    Qcqp p(QuadraticForm::zero(n), {QuadraticForm(A1, b1, c1), QuadraticForm(A2, b2, c2)});
    bool inside = true;
    for (int i = 0; i < n && inside; ++i) {
      for (double s : {-1.0, 1.0}) {
        Vector d = Vector::Zero(n + 1);
        d(i) = s;
        const auto sup = hullcert::sdp::support(p, d);
        if (sup.status != hullcert::sdp::Status::Optimal || sup.value > 2.9) inside = false;
      }
    }
    if (inside) return p;
  }
}

inline Matrix kron_identity(int k, const Matrix& B) {
  const int r = static_cast<int>(B.rows());
  Matrix K = Matrix::Zero(r * k, r * k);
  for (int j = 0; j < k; ++j) K.block(j * r, j * r, r, r) = B;
  return K;
}

/// A_i = I_k (x) B_i with r <= 3, m <= k <= 3, indefinite objective and a
/// definite aggregation.
inline Qcqp kronecker(std::uint64_t seed) {
  Rng r(seed);
  for (;;) {
    const int rr = r.integer(1, 3);
    const int k = r.integer(1, 3);
    const int m = r.integer(1, k);
    const int n = rr * k;
    std::vector<Matrix> B(m);
    Matrix agg = Matrix::Zero(rr, rr);
    for (int i = 0; i < m; ++i) {
      B[i] = r.integer(0, 1) ? r.pd(rr, 0.5, 2.0) : r.sym(rr);
      agg += r.uniform(0.3, 1.5) * B[i];
    }
    const Matrix B0 = r.pd(rr, 0.5, 2.0) - agg;
    if (min_eig(B0) > -0.05) continue;
    std::vector<QuadraticForm> cons;
    for (int i = 0; i < m; ++i) {
      cons.emplace_back(kron_identity(k, B[i]), r.vec(n, 0.3), -r.uniform(0.5, 1.5));
    }
    Qcqp p(QuadraticForm(kron_identity(k, B0), r.vec(n, 0.3), 0.0), cons,
           hullcert::Structure::kronecker(rr, k));
    return p;
  }
}

}  // namespace corpus
