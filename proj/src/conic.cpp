#include "hullcert/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hullcert::conic {

Problem::Problem(int psd_dim_, int lp_dim_, int rows)
    : psd_dim(psd_dim_),
      lp_dim(lp_dim_),
      C(Matrix::Zero(psd_dim_, psd_dim_)),
      c(Vector::Zero(lp_dim_)),
      A_psd(rows, Matrix::Zero(psd_dim_, psd_dim_)),
      A_lp(Matrix::Zero(rows, lp_dim_)),
      b(Vector::Zero(rows)) {}

std::string to_string(Status s) {
  return s == Status::Optimal ? "optimal" : "numerical_failure";
}

namespace {

double inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector apply_A(const Problem& p, const Matrix& X, const Vector& x) {
  Vector r(p.rows());
  for (int k = 0; k < p.rows(); ++k) r(k) = inner(p.A_psd[k], X);
  if (p.lp_dim > 0) r += p.A_lp * x;
  return r;
}

Matrix apply_At_psd(const Problem& p, const Vector& y) {
  Matrix out = Matrix::Zero(p.psd_dim, p.psd_dim);
  for (int k = 0; k < p.rows(); ++k) out += y(k) * p.A_psd[k];
  return out;
}

Vector apply_At_lp(const Problem& p, const Vector& y) {
  if (p.lp_dim == 0) return Vector(0);
  return p.A_lp.transpose() * y;
}

/// Largest a in (0, inf] with X + a dX psd, given X = L L'.
double psd_step(const Eigen::LLT<Matrix>& chol, const Matrix& dX) {
  if (dX.size() == 0) return std::numeric_limits<double>::infinity();
  const auto L = chol.matrixL();
  Matrix t = L.solve(dX);
  t = L.solve(t.transpose()).transpose();
  const double lam = linalg::min_eig(sym(t));
  if (lam >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lam;
}

double lp_step(const Vector& x, const Vector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i) {
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  }
  return a;
}

struct Measures {
  double pobj, dobj, pinf, dinf, gap;
};

Measures measure(const Problem& p, const Matrix& X, const Vector& x,
                 const Vector& y, const Matrix& S, const Vector& z) {
  Measures m{};
  m.pobj = inner(p.C, X) + (p.lp_dim ? p.c.dot(x) : 0.0);
  m.dobj = p.b.dot(y);
  const double bnorm = 1.0 + p.b.norm();
  const double cnorm = 1.0 + std::sqrt(p.C.squaredNorm() + p.c.squaredNorm());
  m.pinf = (p.b - apply_A(p, X, x)).norm() / bnorm;
  const Matrix Rd = p.C - apply_At_psd(p, y) - S;
  const Vector rd = p.c - apply_At_lp(p, y) - z;
  m.dinf = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / cnorm;
  m.gap = std::abs(m.pobj - m.dobj) / (1.0 + std::abs(m.pobj) + std::abs(m.dobj));
  return m;
}

void fill(Solution& s, const Problem& p, const Matrix& X, const Vector& x,
          const Vector& y, const Matrix& S, const Vector& z) {
  s.X = X;
  s.x = x;
  s.y = y;
  s.S = S;
  s.z = z;
  const Measures m = measure(p, X, x, y, S, z);
  s.primal_objective = m.pobj;
  s.dual_objective = m.dobj;
  s.primal_infeasibility = m.pinf;
  s.dual_infeasibility = m.dinf;
  s.relative_gap = m.gap;
}

bool converged(const Solution& s, double tol) {
  return s.relative_gap <= tol && s.primal_infeasibility <= tol &&
         s.dual_infeasibility <= tol;
}

Vector solve_spd(const Matrix& M, const Vector& rhs, bool& ok) {
  // Symmetric diagonal scaling before the factorization.
  Vector d = M.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Matrix Ms = d.asDiagonal() * M * d.asDiagonal();
  const Vector rs = d.cwiseProduct(rhs);
  Eigen::LLT<Matrix> llt(Ms);
  if (llt.info() == Eigen::Success) {
    Vector sol = llt.solve(rs);
    for (int k = 0; k < 2 && sol.allFinite(); ++k) sol += llt.solve(rs - Ms * sol);
    if (sol.allFinite()) {
      ok = true;
      return d.cwiseProduct(sol);
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Ms);
  Vector sol = cod.solve(rs);
  ok = sol.allFinite();
  return d.cwiseProduct(sol);
}

}  // namespace

Solution solve_ipm(const Problem& p, const Options& opts) {
  const int N = p.psd_dim;
  const int L = p.lp_dim;
  const int R = p.rows();
  const double nu = N + L;

  double amax = 0.0;
  for (int k = 0; k < R; ++k) {
    double an = std::sqrt(p.A_psd[k].squaredNorm() +
                          (L ? p.A_lp.row(k).squaredNorm() : 0.0));
    amax = std::max(amax, an);
  }
  double xi = std::max(10.0, std::sqrt(nu));
  for (int k = 0; k < R; ++k) {
    double an = std::sqrt(p.A_psd[k].squaredNorm() +
                          (L ? p.A_lp.row(k).squaredNorm() : 0.0));
    xi = std::max(xi, nu * (1.0 + std::abs(p.b(k))) / (1.0 + an));
  }
  const double cn = std::sqrt(p.C.squaredNorm() + p.c.squaredNorm());
  const double eta = std::max({10.0, std::sqrt(nu), amax, cn});

  Matrix X = xi * Matrix::Identity(N, N);
  Vector x = Vector::Constant(L, xi);
  Vector y = Vector::Zero(R);
  Matrix S = eta * Matrix::Identity(N, N);
  Vector z = Vector::Constant(L, eta);

  Solution sol;
  Solution best;
  double best_score = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.max_iterations; ++it) {
    sol.iterations = it;
    fill(sol, p, X, x, y, S, z);
    const double score = std::max({sol.relative_gap, sol.primal_infeasibility,
                                   sol.dual_infeasibility});
    if (score < best_score) {
      best_score = score;
      best = sol;
    }
    if (converged(sol, opts.tolerance)) {
      sol.status = Status::Optimal;
      return sol;
    }

    const double mu = (inner(X, S) + (L ? x.dot(z) : 0.0)) / nu;
    const Vector rp = p.b - apply_A(p, X, x);
    const Matrix Rd = p.C - apply_At_psd(p, y) - S;
    const Vector rd = p.c - apply_At_lp(p, y) - z;

    Eigen::LLT<Matrix> cholS(S);
    Eigen::LLT<Matrix> cholX(X);
    if (N > 0 && (cholS.info() != Eigen::Success || cholX.info() != Eigen::Success)) break;
    const Matrix Sinv = N > 0 ? cholS.solve(Matrix::Identity(N, N)) : Matrix(0, 0);

    // Schur complement.
    std::vector<Matrix> H(R);
    for (int k = 0; k < R; ++k) H[k] = sym(X * p.A_psd[k] * Sinv);
    Matrix M(R, R);
    const Vector xz = L ? Vector(x.cwiseQuotient(z)) : Vector(0);
    for (int k = 0; k < R; ++k) {
      for (int j = k; j < R; ++j) {
        double v = inner(p.A_psd[j], H[k]);
        if (L) v += (p.A_lp.row(k).transpose().cwiseProduct(xz)).dot(p.A_lp.row(j).transpose());
        M(k, j) = M(j, k) = v;
      }
    }

    const Matrix XRdSinv = N ? Matrix(sym(X * Rd * Sinv)) : Matrix(0, 0);
    auto direction = [&](double sigma, const Matrix& corrX, const Vector& corrx,
                         Matrix& dX, Vector& dx, Vector& dy, Matrix& dS,
                         Vector& dz) -> bool {
      Matrix TX = N ? Matrix(sigma * mu * Sinv - X - XRdSinv - corrX) : Matrix(0, 0);
      Vector tx = L ? Vector((sigma * mu) * z.cwiseInverse() - x -
                             x.cwiseProduct(rd).cwiseQuotient(z) - corrx)
                    : Vector(0);
      Vector rhs = rp - apply_A(p, TX, tx);
      bool ok = false;
      dy = solve_spd(M, rhs, ok);
      if (!ok) return false;
      dS = Rd - apply_At_psd(p, dy);
      dz = rd - apply_At_lp(p, dy);
      if (N) dX = sigma * mu * Sinv - X - sym(X * dS * Sinv) - corrX;
      else dX = Matrix(0, 0);
      if (L) {
        dx = (sigma * mu) * z.cwiseInverse() - x - x.cwiseProduct(dz).cwiseQuotient(z) - corrx;
      } else {
        dx = Vector(0);
      }
      return dX.allFinite() && dx.allFinite() && dS.allFinite();
    };

    Matrix dXa, dSa;
    Vector dxa, dya, dza;
    if (!direction(0.0, Matrix::Zero(N, N), Vector::Zero(L), dXa, dxa, dya, dSa, dza)) break;
    const double ap = std::min(1.0, std::min(psd_step(cholX, dXa), lp_step(x, dxa)));
    const double ad = std::min(1.0, std::min(psd_step(cholS, dSa), lp_step(z, dza)));
    const double mu_aff =
        (inner(X + ap * dXa, S + ad * dSa) +
         (L ? (x + ap * dxa).dot(z + ad * dza) : 0.0)) / nu;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Matrix corrX = N ? Matrix(sym(dXa * dSa * Sinv)) : Matrix(0, 0);
    const Vector corrx = L ? Vector(dxa.cwiseProduct(dza).cwiseQuotient(z)) : Vector(0);
    Matrix dX, dS;
    Vector dx, dy, dz;
    if (!direction(sigma, corrX, corrx, dX, dx, dy, dS, dz)) break;

    const double sp = std::min(1.0, 0.95 * std::min(psd_step(cholX, dX), lp_step(x, dx)));
    const double sd = std::min(1.0, 0.95 * std::min(psd_step(cholS, dS), lp_step(z, dz)));
    if (sp < 1e-12 && sd < 1e-12) break;
    X = sym(X + sp * dX);
    x += sp * dx;
    y += sd * dy;
    S = sym(S + sd * dS);
    z += sd * dz;
  }

  best.status = converged(best, opts.loose_tolerance) ? Status::Optimal
                                                      : Status::NumericalFailure;
  return best;
}

Solution solve_admm(const Problem& p, const Options& opts) {
  const int N = p.psd_dim;
  const int L = p.lp_dim;
  const int R = p.rows();

  Matrix AAt(R, R);
  for (int k = 0; k < R; ++k) {
    for (int j = k; j < R; ++j) {
      double v = inner(p.A_psd[k], p.A_psd[j]);
      if (L) v += p.A_lp.row(k).dot(p.A_lp.row(j));
      AAt(k, j) = AAt(j, k) = v;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(AAt);

  Matrix X = Matrix::Identity(N, N);
  Vector x = Vector::Ones(L);
  Matrix S = Matrix::Identity(N, N);
  Vector z = Vector::Ones(L);
  Vector y = Vector::Zero(R);
  double mu = 1.0;

  Solution sol;
  sol.used_fallback = true;
  for (int it = 0; it < opts.admm_max_iterations; ++it) {
    const Vector AX = apply_A(p, X, x);
    const Vector ASC = apply_A(p, S - p.C, z - p.c);
    y = cod.solve(mu * (p.b - AX) - ASC);
    const Matrix V = p.C - apply_At_psd(p, y) - mu * X;
    const Vector v = p.c - apply_At_lp(p, y) - mu * x;
    if (N) {
      linalg::EigenDecomposition e = linalg::sym_eig(sym(V));
      Vector pos = e.values.cwiseMax(0.0);
      S = e.vectors * pos.asDiagonal() * e.vectors.transpose();
    }
    if (L) z = v.cwiseMax(0.0);
    X = sym((S - V) / mu);
    x = (z - v) / mu;

    if (it % 20 == 0 || it + 1 == opts.admm_max_iterations) {
      sol.iterations = it;
      fill(sol, p, X, x, y, S, z);
      if (converged(sol, opts.loose_tolerance)) {
        sol.status = Status::Optimal;
        return sol;
      }
      if (sol.primal_infeasibility > 10 * sol.dual_infeasibility) mu = std::max(mu / 1.5, 1e-6);
      else if (sol.dual_infeasibility > 10 * sol.primal_infeasibility) mu = std::min(mu * 1.5, 1e6);
    }
  }
  sol.status = Status::NumericalFailure;
  return sol;
}

Solution solve(const Problem& p, const Options& opts) {
  Solution s = solve_ipm(p, opts);
  if (s.status == Status::Optimal || !opts.admm_fallback) return s;
  Solution f = solve_admm(p, opts);
  if (f.status == Status::Optimal) return f;
  return s;
}

}  // namespace hullcert::conic
