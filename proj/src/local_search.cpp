#include "hullcert/local_search.hpp"

#include <algorithm>
#include <random>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace hullcert::search {

namespace {

struct Functor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Vector;
  using ValueType = Vector;
  using JacobianType = Matrix;

  const LeastSquares* problem;
  int padded_values;

  int inputs() const { return problem->inputs; }
  int values() const { return padded_values; }
  int operator()(const Vector& x, Vector& out) const {
    Vector r(problem->values);
    problem->f(x, r);
    out = Vector::Zero(padded_values);
    out.head(problem->values) = r;
    return 0;
  }
};

}  // namespace

LmResult levenberg_marquardt(const LeastSquares& problem, const Vector& x0,
                             int max_evaluations) {
  Functor functor{&problem, std::max(problem.values, problem.inputs)};
  Eigen::NumericalDiff<Functor> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(diff);
  lm.parameters.maxfev = max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  Vector x = x0;
  lm.minimize(x);
  LmResult out;
  out.x = x;
  Vector r(functor.padded_values);
  functor(x, r);
  out.residual_norm = r.norm();
  out.evaluations = static_cast<int>(lm.nfev);
  return out;
}

std::vector<Vector> start_points(int dim, const StartBox& box) {
  std::mt19937_64 rng(box.seed);
  std::uniform_real_distribution<double> u(-box.half_width, box.half_width);
  std::vector<Vector> out;
  out.push_back(Vector::Zero(dim));
  while (static_cast<int>(out.size()) < box.starts) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x(i) = u(rng);
    out.push_back(x);
  }
  return out;
}

std::optional<Vector> strictly_feasible_point(const Qcqp& p, const StartBox& box,
                                              double margin) {
  const int n = p.n();
  const int m = p.m();
  const double target = 2.0 * margin;
  LeastSquares ls;
  ls.inputs = n;
  ls.values = m + n;
  ls.f = [&](const Vector& x, Vector& r) {
    for (int i = 1; i <= m; ++i) r(i - 1) = std::max(0.0, evaluate(p.form(i), x) + target);
    for (int j = 0; j < n; ++j) {
      r(m + j) = std::max(0.0, std::abs(x(j)) - box.half_width);
    }
  };
  for (const Vector& x0 : start_points(n, box)) {
    const LmResult res = levenberg_marquardt(ls, x0, 400 * (n + 1));
    const Vector qv = q_values(p, res.x);
    if (qv.tail(m).maxCoeff() <= -margin &&
        res.x.cwiseAbs().maxCoeff() <= box.half_width) {
      return res.x;
    }
  }
  return std::nullopt;
}

}  // namespace hullcert::search
