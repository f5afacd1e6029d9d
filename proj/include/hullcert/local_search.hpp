#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "hullcert/model.hpp"

namespace hullcert::search {

/// Sum of squares of f(x) with `values` residuals in `inputs` unknowns.
struct LeastSquares {
  int inputs = 0;
  int values = 0;
  std::function<void(const Vector&, Vector&)> f;
};

struct LmResult {
  Vector x;
  double residual_norm = 0.0;
  int evaluations = 0;
};

/// Levenberg-Marquardt with forward-difference Jacobian.
LmResult levenberg_marquardt(const LeastSquares& problem, const Vector& x0,
                             int max_evaluations = 4000);

struct StartBox {
  double half_width = 10.0;
  int starts = 64;
  std::uint64_t seed = 1;
};

/// Deterministic start points, uniform in [-w, w]^dim.
std::vector<Vector> start_points(int dim, const StartBox& box);

/// Point x in the box with max_i q_i(x) <= -margin, by multistart penalized
/// least squares.
std::optional<Vector> strictly_feasible_point(const Qcqp& p, const StartBox& box = {},
                                              double margin = 1e-3);

}  // namespace hullcert::search
