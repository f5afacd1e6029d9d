#include "hullcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hullcert::certify {

std::string to_string(Status s) {
  switch (s) {
    case Status::Exact: return "Exact";
    case Status::NotExact: return "NotExact";
    case Status::SufficientHolds: return "SufficientHolds";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(Grade g) {
  switch (g) {
    case Grade::IffCertified: return "IffCertified";
    case Grade::SufficientOnly: return "SufficientOnly";
    case Grade::Empirical: return "Empirical";
  }
  return "Empirical";
}

std::string to_string(KernelReport::Trigger t) {
  switch (t) {
    case KernelReport::Trigger::Vacuous: return "vacuous";
    case KernelReport::Trigger::Found: return "found";
    case KernelReport::Trigger::NotFound: return "not_found";
    case KernelReport::Trigger::NotNeeded: return "not_needed";
  }
  return "not_needed";
}

namespace {

constexpr double kWitnessViolation = 1e-4;

int rounding_dim_at(const Qcqp& p, const gamma::GammaDescription& desc,
                    const EpigraphPoint& pt, const sdp::Options& opts) {
  const gamma::FaceData face = gamma::face_at(p, desc, pt, opts);
  if (!face.F.normalized) return -1;
  const rounding::Method method =
      desc.polyhedral() ? rounding::Method::Polyhedral : rounding::Method::Exposed;
  return rounding::rounding_subspace(p, face, pt, method).basis.dim();
}

/// Dimension of ker(A) cap b-perp.
int kernel_cap_dim(const Matrix& A, const Vector& b, double tol, int* kernel_dim) {
  const linalg::SubspaceBasis K = linalg::kernel(A, tol);
  if (kernel_dim) *kernel_dim = K.dim();
  if (K.trivial()) return 0;
  const Vector proj = K.basis().transpose() * b;
  const bool b_hits = proj.norm() > tol * std::max(1.0, b.norm());
  return K.dim() - (b_hits ? 1 : 0);
}

int block_count(const Qcqp& p) {
  if (p.structure().kind == Structure::Kind::Kronecker) return p.structure().k;
  return std::max(1, kronecker_blocks(p));
}

Verdict inconclusive_verdict(std::string method, std::string reason) {
  Verdict v;
  v.method = std::move(method);
  v.reason = std::move(reason);
  return v;
}

}  // namespace

WitnessCheck revalidate_witness(const Qcqp& p, const EpigraphPoint& w,
                                const sdp::Options& opts) {
  WitnessCheck out;
  const sdp::MembershipResult mr = sdp::sdp_membership(p, w, opts);
  out.margin = mr.margin;
  out.violation = feasibility_residual(p, w).violation;
  try {
    const gamma::GammaDescription desc = gamma::describe(p);
    out.rounding_dim = rounding_dim_at(p, desc, w, opts);
  } catch (const std::exception&) {
    out.rounding_dim = -1;
  }
  out.ok = mr.status == conic::Status::Optimal &&
           out.margin >= -opts.membership_tol * p.scale() &&
           out.violation >= kWitnessViolation && out.rounding_dim == 0;
  return out;
}

std::vector<EpigraphPoint> boundary_samples(const Qcqp& p, int count, std::uint64_t seed,
                                            const sdp::Options& opts) {
  const int n = p.n();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int pool_size = std::max(16, 4 * (n + 1));
  std::vector<Vector> dirs;
  for (int k = 0; k < pool_size; ++k) {
    Vector d(n + 1);
    for (int i = 0; i <= n; ++i) d(i) = gauss(rng);
    d(n) = -std::abs(d(n)) - 0.25 * d.head(n).norm() - 1e-3;
    dirs.push_back(d.normalized());
  }
  std::vector<std::optional<Vector>> pool(dirs.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(dirs.size()); ++k) {
    const sdp::SupportResult s = sdp::support(p, dirs[k], opts);
    if (s.status == sdp::Status::Optimal) pool[k] = s.argmax.x;
  }
  std::vector<Vector> xs;
  for (const auto& x : pool) {
    if (x) xs.push_back(*x);
  }
  std::vector<EpigraphPoint> out;
  if (xs.empty()) return out;

  std::gamma_distribution<double> expo(1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(xs.size()) - 1);
  std::uniform_int_distribution<int> arity(2, std::min<int>(n + 2, static_cast<int>(xs.size())));
  const int max_tries = 20 * count + 20;
  for (int tries = 0; tries < max_tries && static_cast<int>(out.size()) < count; ++tries) {
    const int a = xs.size() == 1 ? 1 : arity(rng);
    Vector x = Vector::Zero(n);
    double total = 0.0;
    for (int j = 0; j < a; ++j) {
      const double w = expo(rng);
      x += w * xs[pick(rng)];
      total += w;
    }
    x /= total;
    const sdp::EpigraphValue ev = sdp::epigraph_value(p, x, opts);
    if (!ev.finite() || ev.dual_unattained) continue;
    const EpigraphPoint pt{x, 0.5 * ev.value};
    if (feasibility_residual(p, pt).violation <= 10.0 * kWitnessViolation) continue;
    out.push_back(pt);
  }
  return out;
}

namespace {

struct TriggerSearch {
  bool found = false;
  Vector x;
};

/// x with [gi, q(x)] = 0 and [gj, q(x)] < 0, by moving from a strictly
/// feasible point along ker A[gj] and otherwise by local search.
TriggerSearch trigger_search(const Qcqp& p, const Vector& gi, const Vector& gj,
                             const std::optional<Vector>& xhat, const Options& opts) {
  const int n = p.n();
  auto lag = [&](const Vector& g, const Vector& x) { return lagrangian_value(p, g, x); };
  TriggerSearch out;
  if (xhat) {
    const QuadraticForm Qj = aggregate_normalized(p, gj);
    const QuadraticForm Qi = aggregate_normalized(p, gi);
    const linalg::SubspaceBasis K = linalg::kernel(Qj.A(), opts.tol);
    for (int c = 0; c < K.dim(); ++c) {
      Vector y = K.column(c);
      if ((Qj.A() * *xhat + Qj.b()).dot(y) > 0) y = -y;
      const double a2 = y.dot(Qi.A() * y);
      const double a1 = 2.0 * (Qi.A() * *xhat + Qi.b()).dot(y);
      const double a0 = lag(gi, *xhat);
      if (a2 <= 1e-12 || a0 >= 0) continue;
      const double alpha = (-a1 + std::sqrt(a1 * a1 - 4.0 * a2 * a0)) / (2.0 * a2);
      const Vector x = *xhat + alpha * y;
      if (lag(gj, x) < 0) {
        out.found = true;
        out.x = x;
        return out;
      }
    }
  }
  const double delta = 1e-3 * p.scale();
  search::LeastSquares ls;
  ls.inputs = n;
  ls.values = 2;
  ls.f = [&](const Vector& x, Vector& r) {
    r(0) = lag(gi, x);
    r(1) = std::max(0.0, lag(gj, x) + delta);
  };
  search::StartBox box = opts.box;
  box.seed = opts.seed;
  for (const Vector& x0 : search::start_points(n, box)) {
    const search::LmResult res = search::levenberg_marquardt(ls, x0);
    if (std::abs(lag(gi, res.x)) <= 1e-10 * p.scale() && lag(gj, res.x) < -0.5 * delta) {
      out.found = true;
      out.x = res.x;
      return out;
    }
  }
  return out;
}

}  // namespace

Verdict two_constraint(const Qcqp& p, const Options& opts) {
  if (p.m() != 2 || !p.objective_is_zero()) {
    throw PreconditionError("two_constraint: needs a zero objective and two constraints");
  }
  Verdict v;
  v.method = "two-constraint";
  v.grade = Grade::IffCertified;
  const gamma::DefiniteWitness w = gamma::check_assumption_definite(p, 1e3, opts.sdp.conic);
  v.assumptions.definite = w.ok;
  if (!w.ok) throw PreconditionError("two_constraint: no definite aggregation exists");
  v.assumptions.facially_exposed = true;

  const gamma::PencilInterval pi = gamma::gamma1_generators_m2(p);
  const Vector gens[2] = {pi.gamma1, pi.gamma2};
  const bool nonconvex = linalg::min_eig(p.constraint(1).A()) < -opts.tol &&
                         linalg::min_eig(p.constraint(2).A()) < -opts.tol;
  v.assumptions.nonconvex_constraints = nonconvex;
  search::StartBox box = opts.box;
  box.seed = opts.seed;
  const std::optional<Vector> xhat = search::strictly_feasible_point(p, box);
  v.assumptions.primal_strict = xhat.has_value();
  const bool branch_a = nonconvex && xhat.has_value();

  bool unresolved = false;
  std::optional<int> failing;
  std::optional<Vector> witness_x;
  for (int i = 0; i < 2; ++i) {
    KernelReport kr;
    kr.gamma = gens[i];
    kr.interior = gens[i].minCoeff() > 1e-12 * gens[i].norm();
    const QuadraticForm Q = aggregate_normalized(p, gens[i]);
    kr.condition = kernel_cap_dim(Q.A(), Q.b(), opts.tol, &kr.kernel_dim) > 0;
    if (!kr.condition) {
      if (!kr.interior && !branch_a) {
        kr.trigger = KernelReport::Trigger::Vacuous;
      } else {
        const TriggerSearch ts = trigger_search(p, gens[i], gens[1 - i], xhat, opts);
        if (ts.found) {
          kr.trigger = KernelReport::Trigger::Found;
          if (!failing) {
            failing = i;
            witness_x = ts.x;
          }
        } else {
          kr.trigger = KernelReport::Trigger::NotFound;
          unresolved = true;
        }
      }
    }
    v.evidence.kernel.push_back(kr);
  }

  if (failing) {
    v.status = Status::NotExact;
    v.evidence.witness = EpigraphPoint{*witness_x, 0.0};
    v.reason = "kernel condition fails at an exposed generator";
  } else if (unresolved) {
    v.status = Status::Inconclusive;
    v.reason = branch_a ? "kernel condition fails but no exposing point was constructed"
                        : "exposure search failed for a generator";
  } else {
    v.status = Status::Exact;
    v.reason = branch_a ? "kernel condition holds at both generators"
                        : "every generator requirement holds or is vacuous";
  }
  return v;
}

namespace {

struct SampleOutcome {
  bool ok = false;
  bool trivial = false;
  bool not_exact = false;
  double reconstruction = 0.0;
  double epsilon = 0.0;
  std::optional<EpigraphPoint> witness;
};

SampleOutcome run_sample(const Qcqp& p, const gamma::GammaDescription& desc,
                         const EpigraphPoint& pt, rounding::DirectionRule rule,
                         const Options& opts) {
  SampleOutcome o;
  try {
    if (rule != rounding::DirectionRule::Qmp) {
      EpigraphPoint at = pt;
      if (desc.polyhedral()) {
        const auto ev =
            gamma::polyhedral_epigraph_value(p, desc, pt.x, opts.sdp.membership_tol);
        if (ev) at.t = std::min(at.t, 0.5 * *ev);
      }
      const gamma::FaceData face = gamma::face_at(p, desc, at, opts.sdp);
      if (!face.F.normalized) return o;
      const rounding::RoundingSubspace R =
          rounding::rounding_subspace(p, face, at, rounding::Method::Exposed);
      if (R.trivial()) {
        o.trivial = true;
      } else {
        rounding::ValidateOptions vo;
        vo.sdp = opts.sdp;
        o.epsilon = rounding::validate_direction(p, at, R.basis.column(0), vo).epsilon();
      }
    } else {
      const rounding::QmpDirection q = rounding::qmp_rounding_direction(p, pt, opts.sdp, &desc);
      rounding::ValidateOptions vo;
      vo.sdp = opts.sdp;
      o.epsilon = rounding::validate_direction(p, pt, q.direction, vo).epsilon();
    }
    rounding::DecomposeOptions dopt;
    dopt.rule = rule;
    dopt.sdp = opts.sdp;
    const rounding::DecomposeResult dr = rounding::decompose(p, desc, pt, dopt);
    if (dr.status == rounding::DecomposeStatus::Success) {
      o.reconstruction = dr.decomposition.reconstruction_error;
      o.ok = (o.trivial || o.epsilon > 0.0) && o.reconstruction <= 1e-6 &&
             rounding::decomposition_valid(p, pt, dr.decomposition);
    } else if (dr.status == rounding::DecomposeStatus::NotExact) {
      o.not_exact = true;
      o.witness = dr.witness;
    }
  } catch (const std::exception&) {
    o.ok = false;
  }
  return o;
}

void collect(Evidence& ev, const std::vector<SampleOutcome>& outcomes) {
  ev.samples_outside = static_cast<int>(outcomes.size());
  ev.min_epsilon = outcomes.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    if (o.ok) ++ev.samples_ok;
    ev.worst_reconstruction = std::max(ev.worst_reconstruction, o.reconstruction);
    if (!o.trivial) ev.min_epsilon = std::min(ev.min_epsilon, o.epsilon);
  }
  if (!std::isfinite(ev.min_epsilon)) ev.min_epsilon = 0.0;
}

std::vector<SampleOutcome> run_samples(const Qcqp& p, const gamma::GammaDescription& desc,
                                       const std::vector<EpigraphPoint>& pts,
                                       rounding::DirectionRule rule, const Options& opts) {
  std::vector<SampleOutcome> outcomes(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(pts.size()); ++k) {
    outcomes[k] = run_sample(p, desc, pts[k], rule, opts);
  }
  return outcomes;
}

}  // namespace

Verdict qmp(const Qcqp& p, const Options& opts) {
  Verdict v;
  v.method = "qmp";
  v.grade = Grade::SufficientOnly;
  const int k = block_count(p);
  const gamma::DefiniteWitness w = gamma::check_assumption_definite(p, 1e3, opts.sdp.conic);
  v.assumptions.definite = w.ok;
  if (!w.ok) throw PreconditionError("qmp: no definite aggregation exists");
  if (k < p.m()) {
    v.status = Status::Inconclusive;
    v.reason = "block count below the number of constraints";
    return v;
  }
  v.status = Status::Exact;
  v.reason = "block count at least the number of constraints";
  const gamma::GammaDescription desc = gamma::describe(p);
  v.assumptions.facially_exposed = desc.polyhedral() ? std::optional<bool>(true) : std::nullopt;
  const std::vector<EpigraphPoint> pts =
      boundary_samples(p, opts.qmp_samples, opts.seed, opts.sdp);
  v.evidence.samples = opts.qmp_samples;
  collect(v.evidence, run_samples(p, desc, pts, rounding::DirectionRule::Qmp, opts));
  return v;
}

namespace {

std::optional<EpigraphPoint> face_witness(const Qcqp& p, const gamma::GammaDescription& desc,
                                          const gamma::Face& F, const Options& opts) {
  const int n = p.n();
  const Matrix& G = desc.cone.generators();
  std::vector<bool> in_face(G.cols(), false);
  for (int j : F.index) in_face[j] = true;
  const double delta = 1e-3 * p.scale();
  const Vector f = F.f();
  search::LeastSquares ls;
  ls.inputs = n + 1;
  ls.values = static_cast<int>(G.cols()) + 1;
  ls.f = [&](const Vector& z, Vector& r) {
    const EpigraphPoint pt{z.head(n), z(n)};
    const Vector v = q_vector(p, pt);
    for (int j = 0; j < G.cols(); ++j) {
      const double s = G.col(j).dot(v) / G.col(j).norm();
      r(j) = in_face[j] ? s : std::max(0.0, s + delta);
    }
    r(G.cols()) = std::max(0.0, 10.0 * kWitnessViolation - v.maxCoeff());
  };
  search::StartBox box = opts.box;
  box.seed = opts.seed;
  box.starts = opts.witness_starts;
  for (const Vector& x0 : search::start_points(n, box)) {
    Vector z(n + 1);
    z.head(n) = x0;
    z(n) = 0.5 * lagrangian_value(p, f, x0);
    const search::LmResult res = search::levenberg_marquardt(ls, z);
    if (res.residual_norm > 1e-9 * p.scale()) continue;
    const EpigraphPoint pt{res.x.head(n), res.x(n)};
    if (feasibility_residual(p, pt).violation < kWitnessViolation) continue;
    if (revalidate_witness(p, pt, opts.sdp).ok) return pt;
  }
  return std::nullopt;
}

}  // namespace

Verdict polyhedral(const Qcqp& p, const Options& opts) {
  Verdict v;
  v.method = "polyhedral";
  v.grade = Grade::IffCertified;
  const gamma::GammaDescription desc = gamma::polyhedral_description(p);
  v.assumptions.definite = true;
  v.assumptions.facially_exposed = true;

  bool unresolved = false;
  for (const poly::IndexSet& idx : desc.cone.faces()) {
    if (idx.empty()) continue;
    const gamma::Face F = gamma::face_from_index(desc, idx, gamma::Face::Of::Gamma);
    if (!F.normalized) continue;
    FaceReport fr;
    fr.generators = idx;
    fr.f = F.f();
    gamma::FaceData fd;
    fd.F = F;
    fd.G = gamma::conjugate_face(desc, F);
    fd.G_perp = fd.G.span.complement();
    const Vector base = Vector::Zero(p.n());
    fr.rounding_dim = rounding::rounding_subspace(p, fd, EpigraphPoint{base, 0.0},
                                                  rounding::Method::Polyhedral)
                          .basis.dim();
    // A face whose conjugate lies in the nonpositive orthant is only exposed
    // by points of S.
    fr.harmless = fd.G.generators.size() == 0 || fd.G.generators.maxCoeff() <= 1e-12;
    if (fr.rounding_dim == 0 && !fr.harmless) {
      const std::optional<EpigraphPoint> wpt = face_witness(p, desc, F, opts);
      if (wpt) {
        fr.witness_found = true;
        if (!v.evidence.witness) v.evidence.witness = wpt;
      } else {
        unresolved = true;
      }
    }
    v.evidence.faces.push_back(fr);
  }
  if (v.evidence.witness) {
    v.status = Status::NotExact;
    v.reason = "an exposed face has a trivial rounding subspace";
  } else if (unresolved) {
    v.status = Status::Inconclusive;
    v.reason = "faces with trivial rounding subspace but no exposing point found";
  } else {
    v.status = Status::Exact;
    v.reason = "every relevant face has a nontrivial rounding subspace";
  }
  return v;
}

Verdict sampled(const Qcqp& p, const Options& opts) {
  Verdict v;
  v.method = "sampled";
  v.grade = Grade::Empirical;
  const gamma::DefiniteWitness w = gamma::check_assumption_definite(p, 1e3, opts.sdp.conic);
  v.assumptions.definite = w.ok;
  if (!w.ok) return inconclusive_verdict("sampled", "no definite aggregation exists");
  const gamma::GammaDescription desc = gamma::describe(p);
  if (desc.polyhedral()) v.assumptions.facially_exposed = true;

  const std::vector<EpigraphPoint> pts = boundary_samples(p, opts.samples, opts.seed, opts.sdp);
  v.evidence.samples = opts.samples;
  const std::vector<SampleOutcome> outcomes =
      run_samples(p, desc, pts, rounding::DirectionRule::Auto, opts);
  collect(v.evidence, outcomes);

  bool suspect = false;
  for (const auto& o : outcomes) suspect = suspect || o.not_exact;
  if (suspect) {
    if (desc.polyhedral()) {
      Verdict confirm = polyhedral(p, opts);
      if (confirm.status == Status::NotExact) {
        confirm.method = "sampled+polyhedral";
        confirm.evidence.samples = v.evidence.samples;
        confirm.evidence.samples_outside = v.evidence.samples_outside;
        confirm.evidence.samples_ok = v.evidence.samples_ok;
        return confirm;
      }
    }
    v.status = Status::Inconclusive;
    v.reason = "extreme points with trivial rounding subspace; exposure unverified";
    return v;
  }
  if (v.evidence.samples_ok == v.evidence.samples_outside) {
    v.status = Status::SufficientHolds;
    v.reason = v.evidence.samples_outside == 0
                   ? "no sampled point outside S"
                   : "every sampled point admits a rounding direction and decomposes";
  } else {
    v.status = Status::Inconclusive;
    v.reason = "some sampled points failed to decompose";
  }
  return v;
}

Verdict automatic(const Qcqp& p, const Options& opts) {
  if (p.m() == 2 && p.objective_is_zero()) return two_constraint(p, opts);
  if (gamma::polyhedral_applicable(p)) return polyhedral(p, opts);
  if (block_count(p) >= p.m()) return qmp(p, opts);
  return sampled(p, opts);
}

}  // namespace hullcert::certify
