// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hullcert/certify.hpp"
#include "hullcert/oracle.hpp"
#include "hullcert/problem_io.hpp"

using namespace hullcert;

namespace {

using Clock = std::chrono::steady_clock;

bool quiet = false;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failed = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
  if (quiet) return;
  failed += !pass;
  std::printf("criterion %d %s %s: %s (%.1fs)\n", id, pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Named {
  std::string name;
  Qcqp problem;
};

/// Verdicts keyed by instance name, one entry per certifier path.
struct Ledger {
  std::map<std::string, std::vector<certify::Verdict>> verdicts;
  std::map<std::string, const Qcqp*> problems;
  void add(const std::string& name, const Qcqp& p, const certify::Verdict& v) {
    verdicts[name].push_back(v);
    problems[name] = &p;
  }
};

Qcqp t_instance(double b1) {
  Matrix A1(2, 2), A2(2, 2);
  A1 << 1, 0, 0, -1;
  A2 << -1, 0, 0, 3;
  Vector b(2);
  b << b1, 0;
  return Qcqp(QuadraticForm::zero(2),
              {QuadraticForm(A1, b, -1), QuadraticForm(A2, Vector::Zero(2), -1)});
}

Qcqp trs_instance() {
  return Qcqp(QuadraticForm(-Matrix::Identity(1, 1), Vector::Zero(1), 0),
              {QuadraticForm(Matrix::Identity(1, 1), Vector::Zero(1), -1)});
}

std::string verdict_key(const certify::Verdict& v) { return io::to_json(v).dump(); }

// Criterion 1.
void containment() {
  const auto t0 = Clock::now();
  int points = 0, failures = 0;
  double worst = 1e300;
  for (int s = 0; s < 100; ++s) {
    corpus::Rng lift(5000 + s);
    const corpus::FeasibleInstance inst = corpus::random_feasible(1000 + s, 200);
    for (const Vector& x : inst.points) {
      const double t = 0.5 * evaluate(inst.problem.objective(), x) +
                       (lift.integer(0, 1) ? 0.0 : lift.uniform(0.0, 1.0));
      const sdp::MembershipResult r = sdp::sdp_membership(inst.problem, EpigraphPoint{x, t});
      ++points;
      worst = std::min(worst, r.margin / inst.problem.scale());
      if (!r.member || r.margin < -1e-7 * inst.problem.scale()) ++failures;
    }
  }
  const double secs = seconds_since(t0);
  report(1, "containment", failures == 0 && secs <= 120.0,
         std::to_string(points - failures) + "/" + std::to_string(points) +
             " lifted feasible points in the relaxation, worst relative margin " + fmt(worst),
         secs);
}

// Criterion 2.
void s_lemma(std::vector<Named>& poly, Ledger& ledger, std::vector<std::string>& keys) {
  const auto t0 = Clock::now();
  int ok = 0, decomposed = 0, outside = 0;
  double worst_rec = 0.0;
  for (int s = 0; s < 50; ++s) {
    Qcqp p = corpus::single_constraint(2000 + s);
    certify::Options opts;
    opts.seed = 2000 + s;
    const certify::Verdict v = certify::sampled(p, opts);
    const std::string name = "slemma" + std::to_string(s);
    poly.push_back({name, p});
    ledger.add(name, poly.back().problem, v);
    keys.push_back(verdict_key(v));
    outside += v.evidence.samples_outside;
    decomposed += v.evidence.samples_ok;
    worst_rec = std::max(worst_rec, v.evidence.worst_reconstruction);
    if (v.status == certify::Status::SufficientHolds &&
        v.evidence.samples_ok == v.evidence.samples_outside &&
        v.evidence.worst_reconstruction <= 1e-6) {
      ++ok;
    }
  }
  const double secs = seconds_since(t0);
  report(2, "s-lemma", ok == 50 && secs <= 180.0,
         std::to_string(ok) + "/50 SufficientHolds, " + std::to_string(decomposed) + "/" +
             std::to_string(outside) + " boundary points decomposed, worst reconstruction " +
             fmt(worst_rec),
         secs);
}

struct OracleCheck {
  bool agree = false;
  double gap = 0.0;
};

OracleCheck oracle_agrees(const Qcqp& p, const certify::Verdict& v, double half_width,
                          std::uint64_t seed) {
  oracle::GapOptions g;
  g.box = oracle::Box::cube(p.n(), half_width);
  g.resolution = 101;
  g.seed = seed;
  const auto dirs = oracle::default_directions(p.n(), 64, seed);
  const oracle::OracleReport r = oracle::hull_support_gap(p, dirs, g);
  OracleCheck c;
  c.gap = r.max_gap;
  // Local direction search from the best sampled direction and, for a
  // NotExact verdict, from the normal of the relaxation at the witness.
  std::vector<Vector> starts;
  if (r.argmax_index >= 0) starts.push_back(r.argmax_direction);
  if (v.evidence.witness) {
    const EpigraphPoint& w = *v.evidence.witness;
    Vector sep;
    rounding::relaxation_margin(p, w, rounding::Oracle::Sdp, nullptr, {}, &sep);
    const QuadraticForm agg = aggregate(p, sep);
    Vector d(p.n() + 1);
    d.head(p.n()) = 2.0 * (agg.A() * w.x + agg.b());
    d(p.n()) = -2.0 * sep(0);
    if (d.norm() > 0.0) starts.push_back(d.normalized());
  }
  for (const Vector& d : starts) c.gap = std::max(c.gap, oracle::climb_direction(p, d, g, 120).gap);
  if (v.status == certify::Status::Exact) c.agree = c.gap <= 1e-3;
  if (v.status == certify::Status::NotExact) c.agree = c.gap >= 1e-2;
  return c;
}

// Criterion 3.
void two_constraint_suite(std::vector<Named>& poly, Ledger& ledger,
                          std::vector<std::string>& keys) {
  const auto t0 = Clock::now();
  int agree = 0, exact = 0, not_exact = 0;
  std::string disagreements;
  for (int s = 0; s < 100; ++s) {
    const auto kind = static_cast<corpus::LinearKind>(s % 3);
    Qcqp p = corpus::two_constraint(3000 + s, kind);
    certify::Options opts;
    opts.seed = 3000 + s;
    const certify::Verdict v = certify::two_constraint(p, opts);
    const std::string name = "two" + std::to_string(s);
    poly.push_back({name, p});
    const Qcqp& held = poly.back().problem;
    ledger.add(name, held, v);
    ledger.add(name, held, certify::polyhedral(held, opts));
    keys.push_back(verdict_key(v));
    const OracleCheck c = oracle_agrees(held, v, 3.0, 3000 + s);
    exact += v.status == certify::Status::Exact;
    not_exact += v.status == certify::Status::NotExact;
    if (c.agree) ++agree;
    else disagreements += " " + name + "(" + certify::to_string(v.status) + ",gap " + fmt(c.gap) + ")";
  }
  // Fixed regression cases. The second instance extends past [-3, 3]^2, so
  // its oracle box is widened to contain the relaxation.
  const Qcqp t1 = t_instance(0.0), t2 = t_instance(1.0);
  const certify::Verdict v1 = certify::two_constraint(t1);
  const certify::Verdict v2 = certify::two_constraint(t2);
  const OracleCheck c1 = oracle_agrees(t1, v1, 3.0, 1);
  const OracleCheck c2 = oracle_agrees(t2, v2, 5.0, 1);
  const bool fixed = v1.status == certify::Status::Exact && c1.agree &&
                     v2.status == certify::Status::NotExact && c2.agree;
  poly.push_back({"T1", t1});
  ledger.add("T1", poly.back().problem, v1);
  poly.push_back({"T2", t2});
  ledger.add("T2", poly.back().problem, v2);
  keys.push_back(verdict_key(v1));
  keys.push_back(verdict_key(v2));
  const double secs = seconds_since(t0);
  report(3, "two-constraint iff", agree == 100 && fixed && secs <= 600.0,
         std::to_string(agree) + "/100 verdicts match the oracle (" + std::to_string(exact) +
             " Exact, " + std::to_string(not_exact) + " NotExact); T1 " +
             certify::to_string(v1.status) + " gap " + fmt(c1.gap) + ", T2 " +
             certify::to_string(v2.status) + " gap " + fmt(c2.gap) +
             (disagreements.empty() ? "" : "; disagreements:" + disagreements),
         secs);
}

// Criterion 4.
void qmp_suite(std::vector<Named>& poly, Ledger& ledger, std::vector<std::string>& keys) {
  const auto t0 = Clock::now();
  int ok = 0, decomposed = 0;
  double worst_rec = 0.0;
  std::string failed;
  for (int s = 0; s < 30; ++s) {
    Qcqp p = corpus::kronecker(4000 + s);
    certify::Options opts;
    opts.seed = 4000 + s;
    const certify::Verdict v = certify::qmp(p, opts);
    const std::string name = "qmp" + std::to_string(s);
    poly.push_back({name, p});
    ledger.add(name, poly.back().problem, v);
    keys.push_back(verdict_key(v));
    decomposed += v.evidence.samples_ok;
    worst_rec = std::max(worst_rec, v.evidence.worst_reconstruction);
    if (v.status == certify::Status::Exact && v.evidence.samples_outside == 20 &&
        v.evidence.samples_ok == 20 && v.evidence.worst_reconstruction <= 1e-6) {
      ++ok;
    } else {
      failed += " " + name + "(" + std::to_string(v.evidence.samples_ok) + "/" +
                std::to_string(v.evidence.samples_outside) + ")";
    }
  }
  const double secs = seconds_since(t0);
  report(4, "qmp", ok == 30 && secs <= 600.0,
         std::to_string(ok) + "/30 Exact with 20/20 decompositions, " +
             std::to_string(decomposed) + "/600 total, worst reconstruction " + fmt(worst_rec) +
             (failed.empty() ? "" : "; failed:" + failed),
         secs);
}

// Criterion 5.
void method_equivalence(const std::vector<Named>& poly) {
  const auto t0 = Clock::now();
  int instances = 0, points = 0, directions = 0, bad = 0;
  double worst_dist = 0.0, worst_quad = 0.0, min_eps = 1e300;
  for (const Named& inst : poly) {
    const Qcqp& p = inst.problem;
    if (!gamma::polyhedral_applicable(p)) continue;
    const gamma::GammaDescription desc = gamma::polyhedral_description(p);
    ++instances;
    for (const EpigraphPoint& pt : certify::boundary_samples(p, 5, 77)) {
      const gamma::FaceData fd = gamma::face_at(p, desc, pt);
      if (!fd.F.normalized) continue;
      ++points;
      const auto Rp = rounding::rounding_subspace(p, fd, pt, rounding::Method::Polyhedral);
      const auto Re = rounding::rounding_subspace(p, fd, pt, rounding::Method::Exposed);
      const double dist = linalg::projector_distance(Rp.basis, Re.basis);
      worst_dist = std::max(worst_dist, dist);
      if (dist > 1e-7) ++bad;
      for (const auto* R : {&Rp, &Re}) {
        for (int j = 0; j < R->basis.dim(); ++j) {
          const Vector d = R->basis.column(j);
          const auto q = rounding::verify_quadratic_system(p, pt, fd.G_perp, d);
          worst_quad = std::max({worst_quad, q.worst_quadratic, q.worst_linear});
          if (!q.ok) ++bad;
          if (R == &Rp) {
            ++directions;
            const double eps = rounding::validate_direction(p, pt, d).epsilon();
            min_eps = std::min(min_eps, eps);
            if (eps <= 0.0) ++bad;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  report(5, "rounding method equivalence", bad == 0 && points > 0,
         std::to_string(instances) + " polyhedral instances, " + std::to_string(points) +
             " boundary points, " + std::to_string(directions) +
             " directions; worst projector distance " + fmt(worst_dist) +
             ", worst quadratic-system residual " + fmt(worst_quad) + ", min certified step " +
             fmt(min_eps) + ", violations " + std::to_string(bad),
         secs);
}

// Criterion 6. Conjugates are recomputed from inner products.
void face_algebra(const std::vector<Named>& poly) {
  const auto t0 = Clock::now();
  int faces = 0, bad = 0;
  double worst = 0.0;
  for (const Named& inst : poly) {
    if (!gamma::polyhedral_applicable(inst.problem)) continue;
    const gamma::GammaDescription desc = gamma::polyhedral_description(inst.problem);
    const Matrix G = desc.cone.generators();
    const Matrix H = desc.cone.polar_generators();
    auto orth = [](const Matrix& A, const Matrix& B, const poly::IndexSet& idx) {
      poly::IndexSet out;
      for (int j = 0; j < B.cols(); ++j) {
        bool ok = true;
        for (int i : idx) {
          const double s = std::abs(A.col(i).dot(B.col(j)));
          if (s > 1e-9 * A.col(i).norm() * B.col(j).norm()) ok = false;
        }
        if (ok) out.push_back(j);
      }
      return out;
    };
    for (const poly::IndexSet& idx : desc.cone.faces()) {
      ++faces;
      const gamma::Face F = gamma::face_from_index(desc, idx, gamma::Face::Of::Gamma);
      const gamma::Face Gc = gamma::conjugate_face(desc, F);
      const gamma::Face FF = gamma::conjugate_face(desc, Gc);
      const poly::IndexSet g_direct = orth(G, H, idx);
      const poly::IndexSet ff_direct = orth(H, G, g_direct);
      const double d1 = linalg::projector_distance(FF.span, F.span);
      const double d2 = linalg::projector_distance(F.span, Gc.span.complement());
      worst = std::max({worst, d1, d2});
      if (Gc.index != g_direct || FF.index != idx || ff_direct != idx || d1 > 1e-8 || d2 > 1e-8) {
        ++bad;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(6, "face algebra", bad == 0 && faces > 0,
         std::to_string(faces) + " faces, double conjugacy and span identity worst distance " +
             fmt(worst) + ", violations " + std::to_string(bad),
         secs);
}

// Criterion 7.
void soundness(Ledger& ledger) {
  const auto t0 = Clock::now();
  int conflicts = 0, witnesses = 0, bad_witness = 0;
  std::string detail;
  for (const auto& [name, vs] : ledger.verdicts) {
    bool exact = false, not_exact = false;
    for (const auto& v : vs) {
      exact = exact || v.status == certify::Status::Exact;
      not_exact = not_exact || v.status == certify::Status::NotExact;
      if (v.status == certify::Status::NotExact) {
        ++witnesses;
        const Qcqp& p = *ledger.problems[name];
        const auto c = v.evidence.witness
                           ? certify::revalidate_witness(p, *v.evidence.witness)
                           : certify::WitnessCheck{};
        if (!c.ok) {
          ++bad_witness;
          detail += " " + name + "(witness margin " + fmt(c.margin) + ", violation " +
                    fmt(c.violation) + ", dim " + std::to_string(c.rounding_dim) + ")";
        }
      }
    }
    if (exact && not_exact) {
      ++conflicts;
      detail += " " + name + "(conflict)";
    }
  }
  const double secs = seconds_since(t0);
  report(7, "verdict soundness", conflicts == 0 && bad_witness == 0,
         std::to_string(ledger.verdicts.size()) + " instances, " + std::to_string(conflicts) +
             " conflicts, " + std::to_string(witnesses - bad_witness) + "/" +
             std::to_string(witnesses) + " NotExact witnesses re-validated" + detail,
         secs);
}

}  // namespace

int main() {
  std::vector<Named> poly;
  poly.reserve(512);
  Ledger ledger;
  std::vector<std::string> first, second;

  containment();
  s_lemma(poly, ledger, first);
  two_constraint_suite(poly, ledger, first);
  qmp_suite(poly, ledger, first);
  poly.push_back({"TRS", trs_instance()});
  ledger.add("TRS", poly.back().problem, certify::polyhedral(poly.back().problem));
  method_equivalence(poly);
  face_algebra(poly);
  soundness(ledger);

  // Criterion 8: the certifier runs again from scratch with the same seeds.
  const auto t0 = Clock::now();
  {
    std::vector<Named> poly2;
    poly2.reserve(512);
    Ledger ledger2;
    quiet = true;
    s_lemma(poly2, ledger2, second);
    two_constraint_suite(poly2, ledger2, second);
    qmp_suite(poly2, ledger2, second);
    quiet = false;
  }
  int same = 0;
  for (size_t k = 0; k < std::min(first.size(), second.size()); ++k) same += first[k] == second[k];
  const bool det = first.size() == second.size() && same == static_cast<int>(first.size());
  report(8, "determinism", det,
         std::to_string(same) + "/" + std::to_string(first.size()) +
             " verdict JSON documents identical across two runs",
         seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
