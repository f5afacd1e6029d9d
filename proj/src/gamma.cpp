#include "hullcert/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hullcert::gamma {

std::string to_string(Kind k) {
  return k == Kind::Polyhedral ? "polyhedral" : "spectrahedral";
}

Vector DefiniteWitness::stacked() const {
  Vector g(gamma.size() + 1);
  g(0) = 1.0;
  g.tail(gamma.size()) = gamma;
  return g;
}

DefiniteWitness check_assumption_definite(const Qcqp& p, double box,
                                          const conic::Options& opts) {
  const int n = p.n();
  const int m = p.m();
  // Dual variables y = (gamma, lambda); the psd slack is
  // A_obj + sum gamma_i A_i - lambda I and the lp slacks are gamma >= 0 and
  // box - gamma >= 0.
  conic::Problem prob(n, 2 * m, m + 1);
  prob.C = p.objective().A();
  for (int i = 0; i < m; ++i) {
    prob.A_psd[i] = -p.form(i + 1).A();
    prob.A_lp(i, i) = -1.0;
    prob.A_lp(i, m + i) = 1.0;
    prob.c(m + i) = box;
  }
  prob.A_psd[m] = Matrix::Identity(n, n);
  prob.b(m) = 1.0;
  const conic::Solution sol = conic::solve(prob, opts);

  DefiniteWitness w;
  w.status = sol.status;
  if (sol.status != conic::Status::Optimal) return w;
  w.gamma = sol.y.head(m).cwiseMax(0.0).cwiseMin(box);
  w.lambda = linalg::min_eig(aggregate_normalized(p, w.gamma).A());
  w.at_box = m > 0 && w.gamma.maxCoeff() >= box * (1 - 1e-6);
  w.ok = w.lambda >= 1e-6;
  return w;
}

bool gamma_membership(const Qcqp& p, const Vector& g, double tol) {
  if (g.size() != p.m() + 1) throw DimensionError("gamma_membership: length != 1+m");
  if (g.minCoeff() < -tol) return false;
  return linalg::is_psd(aggregate(p, g).A(), tol);
}

bool gamma_membership(const Qcqp& p, const MultiplierPoint& g, double tol) {
  return gamma_membership(p, g.stacked(), tol);
}

namespace {

/// Small-integer representation of (s, 1 - s) when s is rational to 1e-12.
Vector friendly_ray(double s) {
  if (s <= 1e-12) return (Vector(2) << 0.0, 1.0).finished();
  if (s >= 1.0 - 1e-12) return (Vector(2) << 1.0, 0.0).finished();
  // Continued fraction convergents of s.
  double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = s;
  for (int it = 0; it < 30; ++it) {
    const double a = std::floor(r);
    const double h2 = a * h1 + h0;
    const double k2 = a * k1 + k0;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (k1 > 1e4) break;
    if (std::abs(h1 / k1 - s) <= 1e-12) {
      // s = h/k, so the ray is (h, k - h).
      return (Vector(2) << h1, k1 - h1).finished();
    }
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return (Vector(2) << s, 1.0 - s).finished().normalized();
}

template <class F>
double bisect_boundary(F feasible, double inside, double outside) {
  for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-13; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (feasible(mid)) inside = mid;
    else outside = mid;
  }
  return inside;
}

}  // namespace

PencilInterval gamma1_generators_m2(const Qcqp& p) {
  if (p.m() != 2 || !p.objective_is_zero()) {
    throw PreconditionError("gamma1_generators_m2: requires q_obj = 0 and m = 2");
  }
  const DefiniteWitness w = check_assumption_definite(p);
  if (!w.ok) {
    throw PreconditionError("gamma1_generators_m2: no definite aggregation exists");
  }
  const Matrix& A1 = p.constraint(1).A();
  const Matrix& A2 = p.constraint(2).A();
  const double scale = std::max({1.0, A1.norm(), A2.norm()});
  auto pencil_min = [&](double s) { return linalg::min_eig(s * A1 + (1 - s) * A2); };
  auto feasible = [&](double s) { return pencil_min(s) >= -1e-14 * scale; };

  const double s_star = w.gamma(0) / (w.gamma(0) + w.gamma(1));
  PencilInterval out;
  out.s_lo = feasible(0.0) ? 0.0 : bisect_boundary(feasible, s_star, 0.0);
  out.s_hi = feasible(1.0) ? 1.0 : bisect_boundary(feasible, s_star, 1.0);
  out.degenerate = out.s_hi - out.s_lo < 1e-9;
  out.gamma1 = friendly_ray(out.s_lo);
  out.gamma2 = friendly_ray(out.s_hi);
  return out;
}

Matrix GammaDescription::vertices() const {
  const Matrix& G = cone.generators();
  std::vector<int> idx;
  for (int j = 0; j < G.cols(); ++j) {
    if (G(0, j) > 1e-9) idx.push_back(j);
  }
  Matrix out(G.rows() - 1, static_cast<int>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) {
    out.col(k) = G.col(idx[k]).tail(G.rows() - 1) / G(0, idx[k]);
  }
  return out;
}

Matrix GammaDescription::rays() const {
  const Matrix& G = cone.generators();
  std::vector<int> idx;
  for (int j = 0; j < G.cols(); ++j) {
    if (G(0, j) <= 1e-9) idx.push_back(j);
  }
  Matrix out(G.rows() - 1, static_cast<int>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(k) = G.col(idx[k]).tail(G.rows() - 1);
  return out;
}

bool polyhedral_applicable(const Qcqp& p) {
  if (p.structure().kind == Structure::Kind::Diagonal) return true;
  if (p.m() == 1) return true;
  return p.m() == 2 && p.objective_is_zero();
}

namespace {

/// Integer representative of a ray when one with entries <= 1e4 exists.
Vector friendly_scale(const Vector& r) {
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < r.size(); ++i) {
    if (std::abs(r(i)) > 1e-9 * r.norm()) smallest = std::min(smallest, std::abs(r(i)));
  }
  for (int k = 1; k <= 1000; ++k) {
    const Vector w = r * (k / smallest);
    if (w.cwiseAbs().maxCoeff() > 1e4) break;
    const Vector rounded = w.array().round().matrix();
    if ((w - rounded).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, w.norm())) return rounded;
  }
  return r.normalized();
}

Matrix scale_generators(const Matrix& G) {
  Matrix out = G;
  for (int j = 0; j < G.cols(); ++j) {
    if (G(0, j) > 1e-9) out.col(j) = G.col(j) / G(0, j);
    else {
      out(0, j) = 0.0;
      out.col(j) = friendly_scale(out.col(j));
    }
  }
  return out;
}

/// Two-dimensional Gamma for m = 1 via the angle parametrization
/// (cos a, sin a), a in [0, pi/2].
Matrix single_constraint_generators(const Qcqp& p, const Vector& strict) {
  const Matrix& A0 = p.objective().A();
  const Matrix& A1 = p.constraint(1).A();
  const double scale = std::max({1.0, A0.norm(), A1.norm()});
  auto feasible = [&](double a) {
    return linalg::min_eig(std::cos(a) * A0 + std::sin(a) * A1) >= -1e-14 * scale;
  };
  const double a_star = std::atan2(strict(1), strict(0));
  const double half_pi = std::acos(0.0);
  const double lo = feasible(0.0) ? 0.0 : bisect_boundary(feasible, a_star, 0.0);
  const double hi = feasible(half_pi) ? half_pi : bisect_boundary(feasible, a_star, half_pi);
  Matrix G(2, 2);
  G << std::cos(lo), std::cos(hi), std::sin(lo), std::sin(hi);
  if (hi >= half_pi) G.col(1) << 0.0, 1.0;
  if (lo <= 0.0) G.col(0) << 1.0, 0.0;
  // Snap rational ratios, as for the pencil.
  for (int j = 0; j < 2; ++j) {
    const double s = G(0, j) / (G(0, j) + G(1, j));
    const Vector r = friendly_ray(s);
    if ((r.normalized() - G.col(j).normalized()).norm() < 1e-11) G.col(j) = r;
  }
  return G;
}

}  // namespace

GammaDescription polyhedral_description(const Qcqp& p) {
  if (!polyhedral_applicable(p)) {
    throw PreconditionError(
        "polyhedral_description: needs diagonal structure, m = 1, or q_obj = 0 with m = 2");
  }
  const DefiniteWitness w = check_assumption_definite(p);
  if (!w.ok) {
    throw PreconditionError("polyhedral_description: no definite aggregation exists");
  }
  const int m = p.m();
  const int n = p.n();
  GammaDescription desc;
  desc.kind = Kind::Polyhedral;
  desc.strict_point = w.stacked();
  desc.strict_lambda = w.lambda;

  Matrix G;
  if (p.structure().kind == Structure::Kind::Diagonal) {
    desc.source = "diagonal";
    Matrix H = Matrix::Zero(1 + m + n, 1 + m);
    H.topRows(1 + m).setIdentity();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= m; ++i) H(1 + m + j, i) = p.form(i).A()(j, j);
    }
    G = poly::extreme_rays(H);
  } else if (m == 2 && p.objective_is_zero()) {
    desc.source = "pencil";
    const PencilInterval pi = gamma1_generators_m2(p);
    G = Matrix::Zero(3, 3);
    G(0, 0) = 1.0;
    G.block(1, 1, 2, 1) = pi.gamma1;
    G.block(1, 2, 2, 1) = pi.gamma2;
  } else {
    desc.source = "single";
    G = single_constraint_generators(p, desc.strict_point);
  }
  desc.cone = poly::PolyhedralCone::from_generators(scale_generators(G));
  // from_generators keeps the given scaling.
  return desc;
}

GammaDescription describe(const Qcqp& p) {
  if (polyhedral_applicable(p)) return polyhedral_description(p);
  const DefiniteWitness w = check_assumption_definite(p);
  if (!w.ok) throw PreconditionError("describe: no definite aggregation exists");
  GammaDescription desc;
  desc.strict_point = w.stacked();
  desc.strict_lambda = w.lambda;
  return desc;
}

Vector Face::f() const {
  if (!rint_point || !normalized) {
    throw PreconditionError("Face: no relative interior point with gamma_obj = 1");
  }
  return rint_point->tail(rint_point->size() - 1);
}

Face face_from_index(const GammaDescription& desc, const poly::IndexSet& index,
                     Face::Of of) {
  if (!desc.polyhedral()) throw PreconditionError("face_from_index: polyhedral only");
  Face F;
  F.of = of;
  F.index = index;
  F.generators = of == Face::Of::Gamma ? desc.cone.generator_columns(index)
                                       : desc.cone.polar_columns(index);
  const int d = desc.cone.ambient();
  F.span = linalg::SubspaceBasis::span_of(F.generators);
  if (!index.empty()) {
    Vector mean = Vector::Zero(d);
    for (int j = 0; j < F.generators.cols(); ++j) mean += F.generators.col(j).normalized();
    mean /= static_cast<double>(F.generators.cols());
    if (of == Face::Of::Gamma && mean(0) > 1e-9) {
      mean /= mean(0);
      F.normalized = true;
    }
    F.rint_point = mean;
  } else {
    F.span = linalg::SubspaceBasis(d);
  }
  return F;
}

Face conjugate_face(const GammaDescription& desc, const Face& F) {
  if (!desc.polyhedral() || F.approximate) {
    throw PreconditionError("conjugate_face: requires a polyhedral description");
  }
  if (F.of == Face::Of::Gamma) {
    return face_from_index(desc, desc.cone.conjugate(F.index), Face::Of::GammaPolar);
  }
  return face_from_index(desc, desc.cone.conjugate_polar(F.index), Face::Of::Gamma);
}

double polyhedral_margin(const GammaDescription& desc, const Vector& v) {
  const Matrix& G = desc.cone.generators();
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < G.cols(); ++j) {
    worst = std::max(worst, G.col(j).dot(v) / G.col(j).sum());
  }
  return -worst;
}

std::optional<double> polyhedral_epigraph_value(const Qcqp& p,
                                                const GammaDescription& desc,
                                                const Vector& x, double tol) {
  const Vector q = q_values(p, x);
  const Matrix R = desc.rays();
  for (int j = 0; j < R.cols(); ++j) {
    if (R.col(j).dot(q.tail(p.m())) > tol * p.scale() * R.col(j).sum()) return std::nullopt;
  }
  const Matrix V = desc.vertices();
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < V.cols(); ++j) best = std::max(best, q(0) + V.col(j).dot(q.tail(p.m())));
  return best;
}

namespace {

FaceData polyhedral_face(const Qcqp& p, const GammaDescription& desc,
                         const EpigraphPoint& pt) {
  FaceData fd;
  fd.v = q_vector(p, pt);
  fd.margin = polyhedral_margin(desc, fd.v);
  const double vn = fd.v.norm();
  const Matrix& G = desc.cone.generators();
  if (fd.margin < -1e-7 * p.scale()) {
    throw PreconditionError("face_at: point is outside the relaxation");
  }
  poly::IndexSet tight;
  for (int j = 0; j < G.cols(); ++j) {
    if (std::abs(G.col(j).dot(fd.v)) <= 1e-7 * G.col(j).norm() * vn + 1e-14) {
      tight.push_back(j);
    }
  }
  const poly::IndexSet face = desc.cone.closure(tight);
  fd.F = face_from_index(desc, face, Face::Of::Gamma);
  fd.F.exposed_by = fd.v;
  fd.G = conjugate_face(desc, fd.F);
  fd.G_perp = fd.G.span.complement();
  return fd;
}

FaceData spectrahedral_face(const Qcqp& p, const EpigraphPoint& pt,
                            const sdp::Options& opts) {
  const int m = p.m();
  FaceData fd;
  fd.v = q_vector(p, pt);
  const sdp::FiberCenter fc = sdp::fiber_center(p, pt, opts);
  if (fc.status != conic::Status::Optimal) {
    throw std::runtime_error("face_at: fiber solve failed");
  }
  const sdp::MembershipResult mr = sdp::sdp_membership(p, pt, opts);
  fd.margin = mr.margin;
  if (!mr.member) throw PreconditionError("face_at: point is outside the relaxation");

  // A slack deficit s moves vanishing eigenvalues and row slacks by
  // O(sqrt(|s|)) on curved faces.
  const double curved = 10.0 * std::sqrt(std::abs(std::min(0.0, fc.s)) * p.scale());
  const linalg::EigenDecomposition e = linalg::sym_eig(0.5 * (fc.xi + fc.xi.transpose()));
  const double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
  std::vector<int> cols;
  for (int j = 0; j < e.values.size(); ++j) {
    if (e.values(j) > std::max(1e-6 * std::max(1.0, lmax), curved)) cols.push_back(j);
  }
  Matrix V(p.n(), static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) V.col(j) = e.vectors.col(cols[j]);
  const double wtol = std::max(1e-6 * p.scale(), curved);

  // G-perp: V' A(u) V = 0 and u_i = 0 on the support of w.
  std::vector<Vector> rows_g, rows_f;
  for (int a = 0; a < V.cols(); ++a) {
    for (int b = a; b < V.cols(); ++b) {
      Vector r(m + 1);
      for (int i = 0; i <= m; ++i) r(i) = V.col(a).dot(p.form(i).A() * V.col(b));
      rows_g.push_back(r);
    }
    for (int c = 0; c < p.n(); ++c) {
      Vector r(m + 1);
      for (int i = 0; i <= m; ++i) r(i) = (p.form(i).A() * V.col(a))(c);
      rows_f.push_back(r);
    }
  }
  for (int i = 0; i <= m; ++i) {
    if (fc.w(i) > wtol) {
      Vector r = Vector::Zero(m + 1);
      r(i) = 1.0;
      rows_g.push_back(r);
      rows_f.push_back(r);
    }
  }
  auto stack = [&](const std::vector<Vector>& rows) {
    Matrix M(static_cast<int>(rows.size()), m + 1);
    for (size_t k = 0; k < rows.size(); ++k) M.row(k) = rows[k].transpose();
    return M;
  };
  fd.G_perp = linalg::linear_nullspace(stack(rows_g), m + 1, 1e-6);

  fd.F.of = Face::Of::Gamma;
  fd.F.approximate = true;
  fd.F.span = linalg::linear_nullspace(stack(rows_f), m + 1, 1e-6);
  fd.F.exposed_by = fd.v;
  if (fc.weights.sum() > 0.5) {
    Vector r = fc.weights;
    if (r(0) > 1e-9) {
      r /= r(0);
      fd.F.normalized = true;
    }
    fd.F.rint_point = r;
    fd.F.generators = r;
  } else {
    fd.F.generators = Matrix(m + 1, 0);
  }
  fd.G.of = Face::Of::GammaPolar;
  fd.G.approximate = true;
  fd.G.span = fd.G_perp.complement(1e-6);
  fd.G.generators = fd.v;
  fd.lifted = fc.xi;
  return fd;
}

}  // namespace

FaceData face_at(const Qcqp& p, const GammaDescription& desc,
                 const EpigraphPoint& pt, const sdp::Options& opts) {
  if (desc.polyhedral()) return polyhedral_face(p, desc, pt);
  return spectrahedral_face(p, pt, opts);
}

}  // namespace hullcert::gamma
