#include "hullcert/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hullcert::rounding {

std::string to_string(Method m) {
  switch (m) {
    case Method::Polyhedral: return "polyhedral";
    case Method::Exposed: return "exposed";
    case Method::QuadraticSystem: return "quadratic_system";
  }
  return "polyhedral";
}

std::string to_string(DecomposeStatus s) {
  switch (s) {
    case DecomposeStatus::Success: return "success";
    case DecomposeStatus::NotExact: return "not_exact";
    case DecomposeStatus::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

/// A(u) x + b(u) for a stacked multiplier u.
Vector linear_part(const Qcqp& p, const Vector& u, const Vector& x) {
  const QuadraticForm q = aggregate(p, u);
  return q.A() * x + q.b();
}

}  // namespace

RoundingSubspace rounding_subspace(const Qcqp& p, const gamma::FaceData& face,
                                   const EpigraphPoint& pt, Method method) {
  if (method == Method::QuadraticSystem) {
    throw std::invalid_argument("rounding_subspace: the quadratic system is verification only");
  }
  if (!face.F.rint_point || !face.F.normalized) {
    throw PreconditionError("rounding_subspace: face has no point with gamma_obj = 1");
  }
  const int n = p.n();
  RoundingSubspace out;
  out.base = pt;
  out.method = method;
  out.f = face.F.f();
  const double ktol = face.F.approximate ? 1e-5 : 1e-7;
  const linalg::SubspaceBasis K = linalg::kernel(aggregate_normalized(p, out.f).A(), ktol);
  const int k = K.dim();

  std::vector<Vector> rows;
  if (method == Method::Polyhedral) {
    if (face.F.approximate) {
      throw PreconditionError("rounding_subspace: polyhedral method needs exact generators");
    }
    for (int j = 0; j < face.F.generators.cols(); ++j) {
      const Vector g = face.F.generators.col(j);
      const Vector b = aggregate(p, g).b();
      Vector r(k + 1);
      r.head(k) = K.basis().transpose() * b;
      r(k) = -g(0);
      rows.push_back(r / std::max(1.0, r.norm()));
    }
  } else {
    for (int j = 0; j < face.G_perp.dim(); ++j) {
      const Vector u = face.G_perp.column(j);
      Vector r(k + 1);
      r.head(k) = K.basis().transpose() * linear_part(p, u, pt.x);
      r(k) = -u(0);
      rows.push_back(r / std::max(1.0, r.norm()));
    }
  }
  Matrix M(static_cast<int>(rows.size()), k + 1);
  for (size_t i = 0; i < rows.size(); ++i) M.row(i) = rows[i].transpose();
  const linalg::SubspaceBasis Z = linalg::linear_nullspace(M, k + 1, 1e-8);

  Matrix lift = Matrix::Zero(n + 1, k + 1);
  lift.topLeftCorner(n, k) = K.basis();
  lift(n, k) = 1.0;
  out.basis = linalg::SubspaceBasis(n + 1, lift * Z.basis());
  return out;
}

QuadraticCheck verify_quadratic_system(const Qcqp& p, const EpigraphPoint& pt,
                                       const linalg::SubspaceBasis& G_perp,
                                       const Vector& d, double tol) {
  const int n = p.n();
  const Vector dx = d.head(n);
  const double dn = std::max(d.norm(), 1e-300);
  QuadraticCheck out;
  for (int j = 0; j < G_perp.dim(); ++j) {
    const Vector u = G_perp.column(j);
    const QuadraticForm q = aggregate(p, u);
    const double quad = std::abs(dx.dot(q.A() * dx)) / (std::max(1.0, q.A().norm()) * dn * dn);
    const Vector a = q.A() * pt.x + q.b();
    const double lin = std::abs(a.dot(dx) - u(0) * d(n)) /
                       (std::max(1.0, a.norm() + std::abs(u(0))) * dn);
    out.worst_quadratic = std::max(out.worst_quadratic, quad);
    out.worst_linear = std::max(out.worst_linear, lin);
  }
  out.ok = out.worst_quadratic <= tol && out.worst_linear <= tol;
  return out;
}

double relaxation_margin(const Qcqp& p, const EpigraphPoint& pt, Oracle oracle,
                         const gamma::GammaDescription* desc, const sdp::Options& opts,
                         Vector* separator) {
  if (oracle == Oracle::Polyhedral) {
    if (!desc || !desc->polyhedral()) {
      throw PreconditionError("relaxation_margin: polyhedral oracle needs a polyhedral description");
    }
    const Vector v = q_vector(p, pt);
    const Matrix& G = desc->cone.generators();
    int best = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < G.cols(); ++j) {
      const double val = G.col(j).dot(v) / G.col(j).sum();
      if (val > worst) {
        worst = val;
        best = j;
      }
    }
    if (separator) *separator = G.col(best) / G.col(best).sum();
    return -worst;
  }
  const sdp::MembershipResult r = sdp::sdp_membership(p, pt, opts);
  if (r.status != conic::Status::Optimal) {
    throw std::runtime_error("relaxation_margin: membership solve failed");
  }
  if (separator) *separator = r.separator;
  return r.margin;
}

namespace {

/// Largest a in [0, eps_max] with margin(pt + a d) >= -tau; the margin is
/// concave in a.
double one_side(const Qcqp& p, const EpigraphPoint& pt, const Vector& d,
                const ValidateOptions& opts, const gamma::GammaDescription* desc,
                int& evals) {
  const int n = p.n();
  const double tau = opts.sdp.membership_tol * p.scale();
  // Endpoints are located against a tighter threshold so that they land on
  // the boundary rather than at the edge of the membership tolerance.
  const double tau_in = opts.oracle == Oracle::Polyhedral ? 1e-12 * p.scale() : 0.1 * tau;
  auto at = [&](double a) {
    return EpigraphPoint{pt.x + a * d.head(n), pt.t + a * d(n)};
  };
  auto eval = [&](double a, double& slope) {
    ++evals;
    Vector sep;
    const EpigraphPoint q = at(a);
    const double phi = relaxation_margin(p, q, opts.oracle, desc, opts.sdp, &sep);
    double dv = 0.0;
    for (int i = 0; i <= p.m(); ++i) {
      const QuadraticForm& f = p.form(i);
      double di = 2.0 * (f.A() * q.x + f.b()).dot(d.head(n));
      if (i == 0) di -= 2.0 * d(n);
      dv += sep(i) * di;
    }
    slope = -dv;
    return phi;
  };

  double slope = 0.0;
  const double phi0 = eval(0.0, slope);
  if (phi0 < -tau) return 0.0;
  // Measured from the starting margin so that rounding noise carried by pt
  // does not read as a boundary.
  const double floor = std::min(phi0, 0.0) - tau_in;
  double hi = opts.epsilon_max;
  double phi_hi = eval(hi, slope);
  if (phi_hi >= floor) return hi;
  double slope_hi = slope;
  double lo = 0.0;
  bool newton = true;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= opts.resolution * (1.0 + lo)) break;
    double a = 0.5 * (lo + hi);
    if (newton && slope_hi < 0) {
      const double cand = hi + (floor + 0.5 * tau_in - phi_hi) / slope_hi;
      if (cand > lo && cand < hi) a = cand;
    }
    const double width = hi - lo;
    double s = 0.0;
    const double phi = eval(a, s);
    if (phi >= floor) {
      lo = a;
      // Probe just inside the infeasible end once Newton has closed in.
      const double probe = hi - opts.resolution * (1.0 + hi);
      if (probe > lo) {
        double s2 = 0.0;
        const double phi2 = eval(probe, s2);
        if (phi2 >= floor) lo = probe;
        else {
          hi = probe;
          phi_hi = phi2;
          slope_hi = s2;
        }
      }
    } else {
      hi = a;
      phi_hi = phi;
      slope_hi = s;
    }
    newton = (hi - lo) < 0.5 * width ? true : !newton;
  }
  return lo;
}

}  // namespace

StepInterval validate_direction(const Qcqp& p, const EpigraphPoint& pt, const Vector& d,
                                const ValidateOptions& opts,
                                const gamma::GammaDescription* desc) {
  if (d.size() != p.n() + 1) throw DimensionError("validate_direction: length != n+1");
  StepInterval out;
  if (d.norm() == 0.0) return out;
  int evals = 0;
  out.alpha_plus = one_side(p, pt, d, opts, desc, evals);
  out.alpha_minus = one_side(p, pt, Vector(-d), opts, desc, evals);
  out.evaluations = evals;
  return out;
}

QmpDirection qmp_rounding_direction(const Qcqp& p, const EpigraphPoint& pt,
                                    const sdp::Options& opts,
                                    const gamma::GammaDescription* desc) {
  int r = 0, k = 0;
  if (p.structure().kind == Structure::Kind::Kronecker) {
    r = p.structure().r;
    k = p.structure().k;
  } else if (int kb = kronecker_blocks(p); kb > 0) {
    k = kb;
    r = p.n() / kb;
  } else {
    k = 1;
    r = p.n();
  }
  if (k < p.m()) throw PreconditionError("qmp_rounding_direction: needs k >= m");
  if (feasibility_residual(p, pt, 1e-9).in_s) {
    throw PreconditionError("qmp_rounding_direction: point already lies in S");
  }
  const sdp::FiberCenter fc = sdp::fiber_center(p, pt, opts);
  if (fc.status != conic::Status::Optimal) {
    throw std::runtime_error("qmp_rounding_direction: fiber solve failed");
  }
  QmpDirection out;
  out.block_sum = Matrix::Zero(r, r);
  for (int j = 0; j < k; ++j) out.block_sum += fc.xi.block(j * r, j * r, r, r);
  out.block_sum = 0.5 * (out.block_sum + out.block_sum.transpose());
  linalg::SubspaceBasis K = linalg::SubspaceBasis::full(r);
  if (desc && desc->polyhedral()) {
    // The range of the block sum lies in ker of the block factor of A at the
    // relative interior multiplier of F; project to remove solver noise.
    const gamma::FaceData face = gamma::face_at(p, *desc, pt, opts);
    if (face.F.rint_point) {
      Matrix Ar = kronecker_factor(aggregate(p, *face.F.rint_point).A(), r);
      Ar /= std::max(1.0, Ar.norm());
      K = linalg::kernel(Ar, 1e-7);
    }
    if (K.trivial()) throw std::runtime_error("qmp_rounding_direction: face kernel is trivial");
  }
  const Matrix Yk = K.basis().transpose() * out.block_sum * K.basis();
  const linalg::EigenDecomposition e = linalg::sym_eig(0.5 * (Yk + Yk.transpose()));
  const double lmax = e.values(e.values.size() - 1);
  if (lmax <= 1e-9) {
    throw PreconditionError("qmp_rounding_direction: block average vanishes, point lies in S");
  }
  out.y = std::sqrt(lmax) * (K.basis() * e.vectors.col(e.values.size() - 1));

  // Rows: constraints tight at the lifted point. Unknowns (w, t', sigma).
  const Vector v = q_vector(p, pt);
  const double tight = 1e-6 * (1.0 + p.scale());
  std::vector<Vector> rows;
  for (int i = 0; i <= p.m(); ++i) {
    const QuadraticForm& f = p.form(i);
    const Matrix B = f.A().topLeftCorner(r, r);
    const double slack = v(i) + (B * out.block_sum).trace();
    if (slack < -tight) continue;
    const Vector g = 2.0 * (f.A() * pt.x + f.b());
    Vector row(k + 2);
    for (int b = 0; b < k; ++b) row(b) = g.segment(b * r, r).dot(out.y);
    row(k) = i == 0 ? -2.0 : 0.0;
    row(k + 1) = out.y.dot(B * out.y);
    rows.push_back(row);
  }
  Matrix M(rows.size(), k + 2);
  for (size_t i = 0; i < rows.size(); ++i) M.row(i) = rows[i].transpose();
  const linalg::SubspaceBasis Z = linalg::linear_nullspace(M, k + 2, 1e-8);
  if (Z.trivial()) throw std::runtime_error("qmp_rounding_direction: linear system is trivial");
  // Element of the null space with the largest w part.
  const Matrix Zw = Z.basis().topRows(k);
  Eigen::JacobiSVD<Matrix> svd(Zw, Eigen::ComputeFullV);
  if (svd.singularValues()(0) <= 1e-9) {
    throw std::runtime_error("qmp_rounding_direction: linear system is trivial");
  }
  Vector z = Z.basis() * svd.matrixV().col(0);
  z /= z.head(k).norm();
  out.w = z.head(k);
  out.t_prime = z(k);
  out.sigma = z(k + 1);
  out.direction = Vector(p.n() + 1);
  for (int b = 0; b < k; ++b) out.direction.segment(b * r, r) = out.w(b) * out.y;
  out.direction(p.n()) = out.t_prime;
  out.direction.normalize();
  return out;
}

double QmpDirection::s_plus() const { return 0.5 * (sigma + std::sqrt(sigma * sigma + 4.0)); }
double QmpDirection::s_minus() const { return 0.5 * (sigma - std::sqrt(sigma * sigma + 4.0)); }

namespace {

struct Node {
  DecomposeStatus status = DecomposeStatus::Inconclusive;
  Decomposition dec;
  std::optional<EpigraphPoint> witness;
  std::string reason;
};

struct Context {
  const Qcqp& p;
  const gamma::GammaDescription& desc;
  const DecomposeOptions& opts;
  int cap;
  std::mt19937_64 rng;
  int splits = 0;
  bool kron = false;
};

std::optional<double> epigraph_of(Context& c, const Vector& x) {
  if (c.desc.polyhedral()) return gamma::polyhedral_epigraph_value(c.p, c.desc, x, c.opts.sdp.membership_tol);
  const sdp::EpigraphValue ev = sdp::epigraph_value(c.p, x, c.opts.sdp);
  if (ev.kind == sdp::EpigraphValue::Kind::Finite) return ev.value;
  if (ev.kind == sdp::EpigraphValue::Kind::PlusInfinity) return std::nullopt;
  throw std::runtime_error("decompose: epigraph value unavailable");
}

// Step length in [lo, hi] closest to a0 whose endpoint lies in S up to tol.
// Each entry of q along the line is a quadratic in the step.
std::optional<double> snap_to_s(const Qcqp& p, const EpigraphPoint& pt, const Vector& d,
                                double a0, double lo, double hi, double tol) {
  const int n = p.n();
  const Vector dx = d.head(n);
  std::vector<std::pair<double, double>> ok{{lo, hi}};
  for (int i = 0; i <= p.m(); ++i) {
    const QuadraticForm& f = p.form(i);
    const double qa = dx.dot(f.A() * dx);
    double qb = 2.0 * dx.dot(f.A() * pt.x + f.b());
    double qc = evaluate(f, pt.x) - tol;
    if (i == 0) {
      qb -= 2.0 * d(n);
      qc -= 2.0 * pt.t;
    }
    // Intervals of {a : qa a^2 + qb a + qc <= 0} clipped to [lo, hi].
    std::vector<std::pair<double, double>> mine;
    const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);
    if (std::abs(qa) <= 1e-14 * scale) {
      if (std::abs(qb) <= 1e-14 * scale) {
        if (qc <= 0.0) mine.push_back({lo, hi});
      } else if (qb > 0.0) {
        mine.push_back({lo, std::min(hi, -qc / qb)});
      } else {
        mine.push_back({std::max(lo, -qc / qb), hi});
      }
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) {
        if (qa < 0.0) mine.push_back({lo, hi});
      } else {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        double r1 = q / qa, r2 = q != 0.0 ? qc / q : r1;
        if (r1 > r2) std::swap(r1, r2);
        if (qa > 0.0) {
          mine.push_back({std::max(lo, r1), std::min(hi, r2)});
        } else {
          mine.push_back({lo, std::min(hi, r1)});
          mine.push_back({std::max(lo, r2), hi});
        }
      }
    }
    std::vector<std::pair<double, double>> next;
    for (const auto& [a, b] : ok) {
      for (const auto& [c2, d2] : mine) {
        const double l = std::max(a, c2), h = std::min(b, d2);
        if (l <= h) next.push_back({l, h});
      }
    }
    ok = std::move(next);
    if (ok.empty()) return std::nullopt;
  }
  std::optional<double> best;
  for (const auto& [l, h] : ok) {
    const double a = std::clamp(a0, l, h);
    if (!best || std::abs(a - a0) < std::abs(*best - a0)) best = a;
  }
  return best;
}

// Closed-form two-point split along a QMP direction. The endpoints carry
// the lifted certificate with the y component removed from the block sum;
// the split is returned only when both satisfy every lifted constraint.
std::optional<StepInterval> qmp_split(const Qcqp& p, const EpigraphPoint& pt,
                                      const QmpDirection& q, double tol) {
  const int n = p.n();
  const int r = static_cast<int>(q.y.size());
  Vector full(n + 1);
  const int k = static_cast<int>(q.w.size());
  for (int b = 0; b < k; ++b) full.segment(b * r, r) = q.w(b) * q.y;
  full(n) = q.t_prime;
  const double len = full.norm();
  const Matrix rest = q.block_sum - q.y * q.y.transpose();
  for (const double s : {q.s_plus(), q.s_minus()}) {
    const EpigraphPoint e{pt.x + s * full.head(n), pt.t + s * full(n)};
    const Vector v = q_vector(p, e);
    for (int i = 0; i <= p.m(); ++i) {
      const Matrix B = p.form(i).A().topLeftCorner(r, r);
      if (v(i) + (B * rest).trace() > tol) return std::nullopt;
    }
  }
  StepInterval out;
  out.alpha_plus = q.s_plus() * len;
  out.alpha_minus = -q.s_minus() * len;
  return out;
}

Node inconclusive(std::string why) {
  Node n;
  n.reason = std::move(why);
  return n;
}

Node leaf(const EpigraphPoint& pt, double ray) {
  Node n;
  n.status = DecomposeStatus::Success;
  n.dec.points.push_back(pt);
  n.dec.weights.push_back(1.0);
  n.dec.vertical_ray = ray;
  return n;
}

Node recurse(Context& c, EpigraphPoint pt, int depth) {
  const Qcqp& p = c.p;
  const int n = p.n();
  if (feasibility_residual(p, pt).violation <= c.opts.leaf_tol) return leaf(pt, 0.0);

  const std::optional<double> ev = epigraph_of(c, pt.x);
  if (!ev) return inconclusive("point left the relaxation");
  double ray = 0.0;
  // Exact descriptions tighten against their own epigraph value; solver-level
  // slack above it would leave the point off every face.
  const double tight_tol = c.desc.polyhedral() ? 1e-12 * (1.0 + p.scale()) : c.opts.leaf_tol;
  if (2.0 * pt.t - *ev > tight_tol) {
    ray = pt.t - 0.5 * *ev;
    pt.t = 0.5 * *ev;
    if (feasibility_residual(p, pt).violation <= c.opts.leaf_tol) return leaf(pt, ray);
  }
  if (depth >= c.cap) return inconclusive("depth cap reached");

  ValidateOptions vo;
  vo.sdp = c.opts.sdp;
  vo.oracle = c.desc.polyhedral() ? Oracle::Polyhedral : Oracle::Sdp;
  const gamma::GammaDescription* vdesc = c.desc.polyhedral() ? &c.desc : nullptr;

  Vector d;
  StepInterval steps;
  bool have = false;
  const bool use_qmp = c.opts.rule == DirectionRule::Qmp ||
                       (c.opts.rule == DirectionRule::Auto && c.kron && !c.desc.polyhedral());
  bool lifted = false;
  if (use_qmp) {
    try {
      const QmpDirection q = qmp_rounding_direction(p, pt, c.opts.sdp, &c.desc);
      d = q.direction;
      std::optional<StepInterval> s;
      if (!c.desc.polyhedral()) s = qmp_split(p, pt, q, c.opts.sdp.membership_tol * p.scale());
      if (s) {
        steps = *s;
        lifted = true;
      } else {
        steps = validate_direction(p, pt, d, vo, vdesc);
      }
      have = steps.alpha_plus > 1e-10 && steps.alpha_minus > 1e-10;
    } catch (const std::exception&) {
      have = false;
    }
  }
  if (!have) {
    gamma::FaceData face;
    try {
      face = gamma::face_at(p, c.desc, pt, c.opts.sdp);
    } catch (const PreconditionError& e) {
      return inconclusive(e.what());
    }
    if (!face.F.normalized) return inconclusive("face has no point with gamma_obj = 1");
    const Method method = c.desc.polyhedral() ? Method::Polyhedral : Method::Exposed;
    const RoundingSubspace R = rounding_subspace(p, face, pt, method);
    if (R.trivial()) {
      const double viol = feasibility_residual(p, pt).violation;
      if (viol >= c.opts.witness_violation) {
        Node w;
        w.status = DecomposeStatus::NotExact;
        w.witness = pt;
        w.reason = "extreme point of the relaxation outside S";
        return w;
      }
      return inconclusive("trivial rounding subspace at a nearly feasible point");
    }
    if (c.opts.seed) {
      std::normal_distribution<double> g(0.0, 1.0);
      Vector coef(R.basis.dim());
      for (int i = 0; i < coef.size(); ++i) coef(i) = g(c.rng);
      d = R.basis.basis() * coef;
      d.normalize();
    } else {
      d = R.basis.column(0);
    }
    steps = validate_direction(p, pt, d, vo, vdesc);
  }

  double ap = steps.alpha_plus;
  double am = steps.alpha_minus;
  if (ap <= 1e-10 || am <= 1e-10) return inconclusive("rounding direction admits no step");
  // Endpoints that miss S only by the margin tolerance are moved onto S.
  const double stol = 0.5 * c.opts.leaf_tol;
  if (!lifted && feasibility_residual(p, {pt.x + ap * d.head(n), pt.t + ap * d(n)}).violation > c.opts.leaf_tol) {
    if (auto a = snap_to_s(p, pt, d, ap, 0.5 * ap, 2.0 * ap, stol)) ap = *a;
  }
  if (!lifted && feasibility_residual(p, {pt.x - am * d.head(n), pt.t - am * d(n)}).violation > c.opts.leaf_tol) {
    if (auto a = snap_to_s(p, pt, -d, am, 0.5 * am, 2.0 * am, stol)) am = *a;
  }
  ++c.splits;

  const EpigraphPoint plus{pt.x + ap * d.head(n), pt.t + ap * d(n)};
  const EpigraphPoint minus{pt.x - am * d.head(n), pt.t - am * d(n)};
  Node a = recurse(c, plus, depth + 1);
  if (a.status == DecomposeStatus::NotExact) return a;
  Node b = recurse(c, minus, depth + 1);
  if (b.status == DecomposeStatus::NotExact) return b;
  if (a.status != DecomposeStatus::Success) return a;
  if (b.status != DecomposeStatus::Success) return b;

  const double wp = am / (ap + am);
  const double wm = ap / (ap + am);
  Node out;
  out.status = DecomposeStatus::Success;
  for (size_t i = 0; i < a.dec.points.size(); ++i) {
    out.dec.points.push_back(a.dec.points[i]);
    out.dec.weights.push_back(wp * a.dec.weights[i]);
  }
  for (size_t i = 0; i < b.dec.points.size(); ++i) {
    out.dec.points.push_back(b.dec.points[i]);
    out.dec.weights.push_back(wm * b.dec.weights[i]);
  }
  out.dec.vertical_ray = ray + wp * a.dec.vertical_ray + wm * b.dec.vertical_ray;
  return out;
}

double reconstruction_error(const Qcqp& p, const EpigraphPoint& pt, const Decomposition& d) {
  Vector acc = Vector::Zero(p.n() + 1);
  for (size_t i = 0; i < d.points.size(); ++i) acc += d.weights[i] * d.points[i].stacked();
  acc(p.n()) += d.vertical_ray;
  return (acc - pt.stacked()).norm();
}

}  // namespace

DecomposeResult decompose(const Qcqp& p, const gamma::GammaDescription& desc,
                          const EpigraphPoint& pt, const DecomposeOptions& opts) {
  const double margin = relaxation_margin(
      p, pt, desc.polyhedral() ? Oracle::Polyhedral : Oracle::Sdp,
      desc.polyhedral() ? &desc : nullptr, opts.sdp);
  if (margin < -opts.sdp.membership_tol * p.scale()) {
    throw PreconditionError("decompose: point is outside the relaxation");
  }
  Context c{p, desc, opts, opts.depth_cap >= 0 ? opts.depth_cap : p.n() + 2,
            std::mt19937_64(opts.seed.value_or(0)), 0,
            kronecker_blocks(p) >= std::max(p.m(), 1)};
  DecomposeResult out;
  Node root;
  try {
    root = recurse(c, pt, 0);
  } catch (const std::runtime_error& e) {
    root = inconclusive(e.what());
  }
  out.status = root.status;
  out.reason = root.reason;
  out.witness = root.witness;
  out.splits = c.splits;
  if (root.status == DecomposeStatus::Success) {
    out.decomposition = root.dec;
    out.decomposition.reconstruction_error = reconstruction_error(p, pt, root.dec);
  }
  return out;
}

bool decomposition_valid(const Qcqp& p, const EpigraphPoint& pt, const Decomposition& d,
                         double tol) {
  if (d.points.size() != d.weights.size() || d.points.empty()) return false;
  double sum = 0.0;
  for (double w : d.weights) {
    if (w < -1e-12) return false;
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) return false;
  if (d.vertical_ray < -1e-12) return false;
  for (const auto& q : d.points) {
    if (feasibility_residual(p, q).violation > tol) return false;
  }
  return reconstruction_error(p, pt, d) <= tol;
}

}  // namespace hullcert::rounding
