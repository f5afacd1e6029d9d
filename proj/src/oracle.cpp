#include "hullcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hullcert::oracle {

using Interval = std::pair<double, double>;
using Intervals = std::vector<Interval>;

Box Box::cube(int n, double half_width) {
  return Box{Vector::Constant(n, -half_width), Vector::Constant(n, half_width)};
}

bool Box::on_boundary(const Vector& x, double tol) const {
  for (int i = 0; i < dim(); ++i) {
    const double w = tol * std::max(1.0, hi(i) - lo(i));
    if (x(i) <= lo(i) + w || x(i) >= hi(i) - w) return true;
  }
  return false;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// {s : a s^2 + b s + c <= 0}.
Intervals sublevel(double a, double b, double c, double eps) {
  if (std::abs(a) <= eps) {
    if (std::abs(b) <= eps) return c <= 0 ? Intervals{{-kInf, kInf}} : Intervals{};
    const double r = -c / b;
    return b > 0 ? Intervals{{-kInf, r}} : Intervals{{r, kInf}};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0) return a > 0 ? Intervals{} : Intervals{{-kInf, kInf}};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0) return {{r1, r2}};
  return {{-kInf, r1}, {r2, kInf}};
}

Intervals intersect(const Intervals& a, const Intervals& b) {
  Intervals out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (lo <= hi) out.emplace_back(lo, hi);
    if (a[i].second < b[j].second) ++i;
    else ++j;
  }
  return out;
}

/// Max of c2 s^2 + c1 s + c0 over the intervals; returns (value, s).
std::pair<double, double> max_quadratic(double c2, double c1, double c0, const Intervals& iv) {
  double best = -kInf, arg = 0.0;
  auto consider = [&](double s) {
    const double v = (c2 * s + c1) * s + c0;
    if (v > best) {
      best = v;
      arg = s;
    }
  };
  for (const auto& [l, r] : iv) {
    consider(l);
    consider(r);
    if (c2 < 0) {
      const double s = -c1 / (2.0 * c2);
      if (s > l && s < r) consider(s);
    }
  }
  return {best, arg};
}

struct Line {
  Vector base;  // base(axis) = 0
  int axis = 0;
  double q0 = 0.0;    // q_obj(base)
  double g = 0.0;     // (A_obj base + b_obj)_axis
  double diag = 0.0;  // A_obj(axis, axis)
  Intervals iv;
};

/// Objective <d, (x, q_obj(x)/2)> along a line as c2 s^2 + c1 s + c0.
void line_coefficients(const Line& L, const Vector& d, double& c2, double& c1, double& c0) {
  const int n = static_cast<int>(L.base.size());
  const double dt = d(n);
  c2 = 0.5 * dt * L.diag;
  c1 = d(L.axis) + dt * L.g;
  c0 = d.head(n).dot(L.base) + 0.5 * dt * L.q0;
}

long long grid_count(int dims, int resolution) {
  long long c = 1;
  for (int i = 0; i < dims; ++i) c *= resolution;
  return c;
}

double grid_coord(const Box& box, int axis, int idx, int resolution) {
  if (resolution <= 1) return 0.5 * (box.lo(axis) + box.hi(axis));
  return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * idx / (resolution - 1);
}

Line make_line(const Qcqp& p, const Box& box, int axis, long long code, int resolution) {
  const int n = p.n();
  Line L;
  L.axis = axis;
  L.base = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (i == axis) continue;
    L.base(i) = grid_coord(box, i, static_cast<int>(code % resolution), resolution);
    code /= resolution;
  }
  const QuadraticForm& f = p.objective();
  L.q0 = evaluate(f, L.base);
  L.g = (f.A() * L.base + f.b())(axis);
  L.diag = f.A()(axis, axis);
  L.iv = line_feasible_intervals(p, box, L.base, Vector::Unit(n, axis));
  return L;
}

std::vector<Line> build_lines_serial(const Qcqp& p, const Box& box, int resolution) {
  const int n = p.n();
  const long long per_axis = grid_count(n - 1, resolution);
  std::vector<Line> lines;
  lines.reserve(static_cast<size_t>(per_axis * n));
  for (int a = 0; a < n; ++a) {
    for (long long c = 0; c < per_axis; ++c) lines.push_back(make_line(p, box, a, c, resolution));
  }
  return lines;
}

std::vector<Line> build_lines_parallel(const Qcqp& p, const Box& box, int resolution) {
  const int n = p.n();
  const long long per_axis = grid_count(n - 1, resolution);
  const long long total = per_axis * n;
  std::vector<Line> lines(static_cast<size_t>(total));
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < total; ++k) {
    lines[k] = make_line(p, box, static_cast<int>(k / per_axis), k % per_axis, resolution);
  }
  return lines;
}

struct Candidate {
  double value = -kInf;
  long long line = -1;
  Vector x;
};

/// Best `keep` lines for direction d, ordered by value then line index.
std::vector<Candidate> scan_lines(const std::vector<Line>& lines, const Vector& d, int keep) {
  std::vector<Candidate> best;
  for (size_t k = 0; k < lines.size(); ++k) {
    const Line& L = lines[k];
    if (L.iv.empty()) continue;
    double c2, c1, c0;
    line_coefficients(L, d, c2, c1, c0);
    const auto [v, s] = max_quadratic(c2, c1, c0, L.iv);
    if (static_cast<int>(best.size()) == keep && v <= best.back().value) continue;
    Candidate c{v, static_cast<long long>(k), L.base};
    c.x(L.axis) = s;
    const auto pos = std::upper_bound(best.begin(), best.end(), c,
                                      [](const Candidate& a, const Candidate& b) {
                                        return a.value > b.value;
                                      });
    best.insert(pos, std::move(c));
    if (static_cast<int>(best.size()) > keep) best.pop_back();
  }
  return best;
}

double lifted_value(const Qcqp& p, const Vector& d, const Vector& x) {
  const int n = p.n();
  return d.head(n).dot(x) + 0.5 * d(n) * evaluate(p.objective(), x);
}

/// Exact line maximization along axes and random directions, staying feasible.
Vector refine(const Qcqp& p, const Box& box, const Vector& d, Vector x, int rounds,
              std::mt19937_64& rng) {
  const int n = p.n();
  const QuadraticForm& f = p.objective();
  std::normal_distribution<double> gauss(0.0, 1.0);
  double current = lifted_value(p, d, x);
  for (int r = 0; r < rounds; ++r) {
    const double start = current;
    for (int k = 0; k < 2 * n; ++k) {
      Vector u(n);
      if (k < n) {
        u = Vector::Unit(n, k);
      } else {
        for (int i = 0; i < n; ++i) u(i) = gauss(rng);
        u.normalize();
      }
      const Intervals iv = line_feasible_intervals(p, box, x, u);
      if (iv.empty()) continue;
      const double c2 = 0.5 * d(n) * u.dot(f.A() * u);
      const double c1 = d.head(n).dot(u) + d(n) * (f.A() * x + f.b()).dot(u);
      const auto [v, s] = max_quadratic(c2, c1, current, iv);
      if (v > current) {
        const Vector y = x + s * u;
        if (feasibility_residual(p, EpigraphPoint{y, 0.5 * evaluate(f, y)}, 1e-9).in_s) {
          x = y;
          current = lifted_value(p, d, x);
        }
      }
    }
    if (current - start <= 1e-15 * std::max(1.0, std::abs(current))) break;
  }
  return x;
}

/// Constraint q_index <= 0 (index >= 1) or box face grad'x + offset <= 0.
struct ActiveRow {
  int index = 0;
  Vector grad;
  double offset = 0.0;
  double value = 0.0;
};

ActiveRow evaluate_row(const Qcqp& p, ActiveRow r, const Vector& x) {
  if (r.index > 0) {
    const QuadraticForm& q = p.form(r.index);
    r.grad = 2.0 * (q.A() * x + q.b());
    r.value = evaluate(q, x);
  } else {
    r.value = r.grad.dot(x) + r.offset;
  }
  return r;
}

std::vector<ActiveRow> active_rows(const Qcqp& p, const Box& box, const Vector& x, double band) {
  const int n = p.n();
  std::vector<ActiveRow> rows;
  for (int i = 1; i <= p.m(); ++i) {
    ActiveRow r = evaluate_row(p, ActiveRow{i, Vector(), 0.0, 0.0}, x);
    if (r.value >= -band) rows.push_back(std::move(r));
  }
  for (int j = 0; j < n; ++j) {
    const double w = 1e-12 * std::max(1.0, box.hi(j) - box.lo(j));
    if (x(j) >= box.hi(j) - w) {
      rows.push_back(evaluate_row(p, ActiveRow{0, Vector::Unit(n, j), -box.hi(j)}, x));
    }
    if (x(j) <= box.lo(j) + w) {
      rows.push_back(evaluate_row(p, ActiveRow{0, -Vector::Unit(n, j), box.lo(j)}, x));
    }
  }
  return rows;
}

Matrix jacobian(const std::vector<ActiveRow>& rows, int n) {
  Matrix J(rows.size(), n);
  for (size_t r = 0; r < rows.size(); ++r) J.row(r) = rows[r].grad.transpose();
  return J;
}

/// Active-set Newton ascent of <d, (x, q_obj(x)/2)> from a feasible x. Rows
/// with negative multipliers are released; steps are retracted onto the
/// remaining active constraints and accepted only when feasible and better.
Vector polish(const Qcqp& p, const Box& box, const Vector& d, Vector x) {
  const int n = p.n();
  const QuadraticForm& f = p.objective();
  const double dt = d(n);
  const double band = 1e-8 * (1.0 + p.scale());
  auto feasible = [&](const Vector& y) {
    for (int i = 0; i < n; ++i) {
      if (y(i) < box.lo(i) || y(i) > box.hi(i)) return false;
    }
    return feasibility_residual(p, EpigraphPoint{y, 0.5 * evaluate(f, y)}, 1e-9).in_s;
  };
  double current = lifted_value(p, d, x);
  for (int it = 0; it < 100; ++it) {
    const Vector g = d.head(n) + dt * (f.A() * x + f.b());
    std::vector<ActiveRow> rows = active_rows(p, box, x, band);
    Vector mu;
    for (;;) {
      if (rows.empty()) {
        mu = Vector();
        break;
      }
      const Matrix J = jacobian(rows, n);
      mu = J.transpose().completeOrthogonalDecomposition().solve(g);
      Eigen::Index worst = 0;
      if (mu.minCoeff(&worst) >= -1e-10 * std::max(1.0, g.norm())) break;
      rows.erase(rows.begin() + worst);
    }
    Matrix W = dt * f.A();
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].index > 0) W -= 2.0 * mu(r) * p.form(rows[r].index).A();
    }
    Matrix Z = Matrix::Identity(n, n);
    Vector normal = Vector::Zero(n);
    if (!rows.empty()) {
      const Matrix J = jacobian(rows, n);
      Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
      int rank = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > 1e-10 * std::max(1.0, svd.singularValues()(0))) ++rank;
      }
      Z = svd.matrixV().rightCols(n - rank);
      Vector c(rows.size());
      for (size_t r = 0; r < rows.size(); ++r) c(r) = rows[r].value;
      normal = -J.completeOrthogonalDecomposition().solve(c);
    }
    if (Z.cols() == 0) break;
    const Vector rg = Z.transpose() * g;
    Matrix Hr = Z.transpose() * W * Z;
    Hr = 0.5 * (Hr + Hr.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(Hr);
    const double top = es.eigenvalues().maxCoeff();
    const double shift = std::max(0.0, top + 1e-8 * (1.0 + Hr.norm())) + (top >= 0.0 ? 1.0 : 0.0);
    const Vector delta =
        (shift * Matrix::Identity(Hr.rows(), Hr.cols()) - Hr).ldlt().solve(rg);
    const Vector dx = Z * delta + normal;
    if (dx.norm() <= 1e-15 * (1.0 + x.norm())) break;
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5) {
      Vector y = x + alpha * dx;
      for (int k = 0; k < 5 && !rows.empty(); ++k) {
        std::vector<ActiveRow> now;
        for (const ActiveRow& r : rows) now.push_back(evaluate_row(p, r, y));
        Vector c(now.size());
        for (size_t r = 0; r < now.size(); ++r) c(r) = now[r].value;
        if (c.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + p.scale())) break;
        y -= jacobian(now, n).completeOrthogonalDecomposition().solve(c);
      }
      if (feasible(y)) {
        const double v = lifted_value(p, d, y);
        if (v > current) {
          x = y;
          current = v;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  return x;
}

std::uint64_t direction_seed(std::uint64_t seed, int index) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1;
}

DirectionGap evaluate_direction(const Qcqp& p, const std::vector<Line>& lines,
                                const Vector& d, int index, const GapOptions& opts) {
  DirectionGap g;
  g.d = d;
  const sdp::SupportResult s = sdp::support(p, d, opts.sdp);
  g.status = s.status;
  g.relaxation = s.status == sdp::Status::Optimal ? s.value : kInf;
  const std::vector<Candidate> best = scan_lines(lines, d, std::max(1, opts.refine_starts));
  if (best.empty()) return g;
  g.sampled_raw = best.front().value;
  g.sampled = g.sampled_raw;
  g.argmax = best.front().x;
  std::mt19937_64 rng(direction_seed(opts.seed, index));
  for (const Candidate& c : best) {
    const Vector x = polish(p, opts.box, d, refine(p, opts.box, d, c.x, opts.refine_rounds, rng));
    const double v = lifted_value(p, d, x);
    if (v > g.sampled) {
      g.sampled = v;
      g.argmax = x;
    }
  }
  g.gap_raw = g.relaxation - g.sampled_raw;
  g.gap = g.relaxation - g.sampled;
  g.boundary = opts.box.on_boundary(g.argmax, 1e-9);
  return g;
}

double grid_error(const Qcqp& p, const Box& box, int resolution,
                  const std::vector<Vector>& dirs) {
  const int n = p.n();
  if (n <= 1 || resolution <= 1) return 0.0;
  double h = 0.0, radius = 0.0;
  for (int i = 0; i < n; ++i) {
    h = std::max(h, (box.hi(i) - box.lo(i)) / (resolution - 1));
    radius += std::pow(std::max(std::abs(box.lo(i)), std::abs(box.hi(i))), 2);
  }
  radius = std::sqrt(radius);
  const double a = linalg::spectral_norm(p.objective().A());
  const double b = p.objective().b().norm();
  double L = 0.0;
  for (const Vector& d : dirs) {
    L = std::max(L, d.head(n).norm() + std::abs(d(n)) * (a * radius + b));
  }
  return 0.5 * L * h * std::sqrt(static_cast<double>(n - 1));
}

void finish(OracleReport& r) {
  r.max_gap = -kInf;
  r.max_gap_raw = -kInf;
  for (size_t k = 0; k < r.per_direction.size(); ++k) {
    const DirectionGap& g = r.per_direction[k];
    if (g.status != sdp::Status::Optimal) continue;
    r.boundary_flag = r.boundary_flag || g.boundary;
    r.max_gap_raw = std::max(r.max_gap_raw, g.gap_raw);
    if (g.gap > r.max_gap) {
      r.max_gap = g.gap;
      r.argmax_index = static_cast<int>(k);
      r.argmax_direction = g.d;
    }
  }
  if (r.argmax_index < 0) {
    r.max_gap = 0.0;
    r.max_gap_raw = 0.0;
  }
}

long long retained(const std::vector<Line>& lines) {
  long long c = 0;
  for (const Line& L : lines) c += L.iv.empty() ? 0 : 1;
  return c;
}

}  // namespace

std::vector<std::pair<double, double>> line_feasible_intervals(const Qcqp& p, const Box& box,
                                                               const Vector& x,
                                                               const Vector& u) {
  const int n = p.n();
  double lo = -kInf, hi = kInf;
  for (int i = 0; i < n; ++i) {
    if (u(i) == 0.0) {
      if (x(i) < box.lo(i) || x(i) > box.hi(i)) return {};
      continue;
    }
    double a = (box.lo(i) - x(i)) / u(i);
    double b = (box.hi(i) - x(i)) / u(i);
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  if (lo > hi) return {};
  Intervals iv{{lo, hi}};
  const double eps = 1e-14 * p.scale();
  for (int i = 1; i <= p.m() && !iv.empty(); ++i) {
    const QuadraticForm& q = p.form(i);
    const double a = u.dot(q.A() * u);
    const double b = 2.0 * (q.A() * x + q.b()).dot(u);
    const double c = evaluate(q, x);
    iv = intersect(iv, sublevel(a, b, c, eps));
  }
  return iv;
}

FeasibleSample feasible_sample(const Qcqp& p, const Box& box, int resolution, Exec exec) {
  const int n = p.n();
  if (n > 4) throw PreconditionError("feasible_sample: grid mode needs n <= 4");
  const long long total = grid_count(n, resolution);
  auto point = [&](long long code) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = grid_coord(box, i, static_cast<int>(code % resolution), resolution);
      code /= resolution;
    }
    return x;
  };
  auto feasible = [&](const Vector& x) {
    for (int i = 1; i <= p.m(); ++i) {
      if (evaluate(p.form(i), x) > 1e-9) return false;
    }
    return true;
  };
  FeasibleSample out;
  out.grid_points = total;
  std::vector<char> keep(static_cast<size_t>(total), 0);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < total; ++k) keep[k] = feasible(point(k)) ? 1 : 0;
  } else {
    for (long long k = 0; k < total; ++k) keep[k] = feasible(point(k)) ? 1 : 0;
  }
  for (long long k = 0; k < total; ++k) {
    if (!keep[k]) continue;
    const Vector x = point(k);
    out.points.push_back(x);
    out.lifted.push_back({x, 0.5 * evaluate(p.objective(), x)});
  }
  return out;
}

FeasibleSample feasible_sample_random(const Qcqp& p, const Box& box, int draws,
                                      std::uint64_t seed) {
  const int n = p.n();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeasibleSample out;
  out.grid_points = draws;
  for (int k = 0; k < draws; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * u(rng);
    bool ok = true;
    for (int i = 1; i <= p.m() && ok; ++i) ok = evaluate(p.form(i), x) <= 1e-9;
    if (!ok) continue;
    out.points.push_back(x);
    out.lifted.push_back({x, 0.5 * evaluate(p.objective(), x)});
  }
  return out;
}

std::vector<Vector> default_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    Vector d(n + 1);
    for (int i = 0; i <= n; ++i) d(i) = gauss(rng);
    d(n) = -std::abs(d(n));
    if (d.norm() < 1e-12) continue;
    out.push_back(d.normalized());
  }
  return out;
}

OracleReport hull_support_gap(const Qcqp& p, const std::vector<Vector>& directions,
                              const GapOptions& opts, Exec exec) {
  if (opts.box.dim() != p.n()) throw DimensionError("hull_support_gap: box dimension != n");
  OracleReport r;
  r.box = opts.box;
  r.resolution = opts.resolution;
  r.directions = static_cast<int>(directions.size());
  const std::vector<Line> lines = exec == Exec::Parallel
                                      ? build_lines_parallel(p, opts.box, opts.resolution)
                                      : build_lines_serial(p, opts.box, opts.resolution);
  r.lines = static_cast<long long>(lines.size());
  r.samples_retained = retained(lines);
  if (r.samples_retained == 0) {
    r.empty = true;
    return r;
  }
  r.per_direction.resize(directions.size());
  const int count = static_cast<int>(directions.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) {
      r.per_direction[k] = evaluate_direction(p, lines, directions[k], k, opts);
    }
  } else {
    for (int k = 0; k < count; ++k) {
      r.per_direction[k] = evaluate_direction(p, lines, directions[k], k, opts);
    }
  }
  finish(r);
  r.grid_error_bound = grid_error(p, opts.box, opts.resolution, directions);
  return r;
}

DirectionGap climb_direction(const Qcqp& p, const Vector& start, const GapOptions& opts,
                             int rounds) {
  if (opts.box.dim() != p.n()) throw DimensionError("climb_direction: box dimension != n");
  const int n = p.n();
  const std::vector<Line> lines = build_lines_parallel(p, opts.box, opts.resolution);
  auto unit = [&](Vector d) {
    d(n) = -std::abs(d(n));
    return Vector(d.normalized());
  };
  auto score = [](const DirectionGap& g) {
    return g.status == sdp::Status::Optimal ? g.gap : -kInf;
  };
  DirectionGap best = evaluate_direction(p, lines, unit(start), 0, opts);
  std::mt19937_64 rng(direction_seed(opts.seed, -1));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double step = 0.3;
  int stale = 0;
  for (int r = 0; r < rounds && step > 1e-3; ++r) {
    Vector d = best.d;
    for (int i = 0; i <= n; ++i) d(i) += step * gauss(rng);
    const DirectionGap g = evaluate_direction(p, lines, unit(d), r + 1, opts);
    if (score(g) > score(best)) {
      best = g;
      stale = 0;
    } else if (++stale == 20) {
      step *= 0.6;
      stale = 0;
    }
  }
  return best;
}

double global_min_bruteforce(const Qcqp& p, const Box& box, int resolution, Exec exec) {
  if (p.n() > 4) throw PreconditionError("global_min_bruteforce: needs n <= 4");
  const std::vector<Line> lines = exec == Exec::Parallel
                                      ? build_lines_parallel(p, box, resolution)
                                      : build_lines_serial(p, box, resolution);
  Vector d = Vector::Zero(p.n() + 1);
  d(p.n()) = -1.0;
  const std::vector<Candidate> best = scan_lines(lines, d, 8);
  if (best.empty()) throw PreconditionError("global_min_bruteforce: empty feasible sample");
  std::mt19937_64 rng(direction_seed(1, 0));
  double top = best.front().value;
  for (const Candidate& c : best) {
    const Vector x = polish(p, box, d, refine(p, box, d, c.x, 40, rng));
    top = std::max(top, lifted_value(p, d, x));
  }
  return -2.0 * top;
}

}  // namespace hullcert::oracle
