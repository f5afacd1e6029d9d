#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hullcert/model.hpp"
#include "hullcert/sdp.hpp"

namespace hullcert::oracle {

struct Box {
  Vector lo;
  Vector hi;
  static Box cube(int n, double half_width);
  int dim() const { return static_cast<int>(lo.size()); }
  bool on_boundary(const Vector& x, double tol) const;
};

enum class Exec { Serial, Parallel };

struct FeasibleSample {
  std::vector<Vector> points;
  std::vector<EpigraphPoint> lifted;  // (x, q_obj(x)/2)
  long long grid_points = 0;
  bool empty() const { return points.empty(); }
};

/// Grid points of the box (resolution per axis) with feasibility residual
/// at most 1e-9. Grid mode needs n <= 4.
FeasibleSample feasible_sample(const Qcqp& p, const Box& box, int resolution,
                               Exec exec = Exec::Parallel);
/// Uniform rejection sampling; any n.
FeasibleSample feasible_sample_random(const Qcqp& p, const Box& box, int draws,
                                      std::uint64_t seed);

/// Feasible intervals of {s : q_i(x + s u) <= 0, i = 1..m} inside the box.
std::vector<std::pair<double, double>> line_feasible_intervals(const Qcqp& p, const Box& box,
                                                               const Vector& x,
                                                               const Vector& u);

struct GapOptions {
  Box box;
  int resolution = 101;
  int directions = 64;
  std::uint64_t seed = 1;
  /// Line-search rounds from the best grid lines of each direction.
  int refine_rounds = 40;
  int refine_starts = 8;
  sdp::Options sdp;
};

struct DirectionGap {
  Vector d;
  sdp::Status status = sdp::Status::NumericalFailure;
  double relaxation = 0.0;
  double sampled_raw = 0.0;  // best over grid lines
  double sampled = 0.0;      // after refinement
  double gap_raw = 0.0;
  double gap = 0.0;
  Vector argmax;
  bool boundary = false;
};

struct OracleReport {
  Box box;
  int resolution = 0;
  int directions = 0;
  std::vector<DirectionGap> per_direction;
  double max_gap = 0.0;
  double max_gap_raw = 0.0;
  int argmax_index = -1;
  Vector argmax_direction;
  double grid_error_bound = 0.0;
  bool boundary_flag = false;
  bool empty = false;
  long long lines = 0;
  long long samples_retained = 0;
  std::optional<double> global_min;
};

/// Unit directions in R^{n+1} with non-positive last coordinate.
std::vector<Vector> default_directions(int n, int count, std::uint64_t seed);

/// sup over the relaxation minus sup over feasible lifted points, per
/// direction. Lifted points sit at t = q_obj(x)/2.
OracleReport hull_support_gap(const Qcqp& p, const std::vector<Vector>& directions,
                              const GapOptions& opts, Exec exec = Exec::Parallel);

/// Random-perturbation ascent of the gap over unit directions with
/// non-positive last coordinate, starting from `start`. Deterministic in
/// opts.seed.
DirectionGap climb_direction(const Qcqp& p, const Vector& start, const GapOptions& opts,
                             int rounds = 200);

/// min q_obj over the feasible grid lines, refined by line searches from the
/// best 8 lines. Throws PreconditionError on an empty feasible sample.
double global_min_bruteforce(const Qcqp& p, const Box& box, int resolution,
                             Exec exec = Exec::Parallel);

}  // namespace hullcert::oracle
