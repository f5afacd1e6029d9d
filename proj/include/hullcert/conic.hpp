#pragma once

#include <string>
#include <vector>

#include "hullcert/linalg.hpp"

namespace hullcert::conic {

/// min <C, X> + c'x  s.t.  <A_k, X> + a_k'x = b_k,  X psd (N x N),  x >= 0.
/// Either block may be empty. Dual: max b'y with S = C - sum y_k A_k psd and
/// z = c - a'y >= 0.
struct Problem {
  int psd_dim = 0;
  int lp_dim = 0;
  Matrix C;
  Vector c;
  std::vector<Matrix> A_psd;  // one symmetric N x N matrix per row
  Matrix A_lp;                // rows x L
  Vector b;

  Problem(int psd_dim, int lp_dim, int rows);
  int rows() const { return static_cast<int>(b.size()); }
};

enum class Status { Optimal, NumericalFailure };

struct Options {
  double tolerance = 1e-9;
  /// Accepted when the main tolerance is not reached before stagnation.
  double loose_tolerance = 1e-7;
  int max_iterations = 200;
  bool admm_fallback = true;
  int admm_max_iterations = 20000;
};

struct Solution {
  Status status = Status::NumericalFailure;
  Matrix X;
  Vector x;
  Vector y;
  Matrix S;
  Vector z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool used_fallback = false;
};

/// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector).
/// Falls back to an ADMM iteration on the dual when the interior point
/// method stalls.
Solution solve(const Problem& prob, const Options& opts = {});

/// Interior point only, no fallback.
Solution solve_ipm(const Problem& prob, const Options& opts = {});
/// ADMM on the dual, exposed for testing.
Solution solve_admm(const Problem& prob, const Options& opts = {});

std::string to_string(Status s);

}  // namespace hullcert::conic
