#include "hullcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hullcert::sdp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "numerical_failure";
}

namespace {

struct EqualityRow {
  Matrix P;
  double rhs;
};

/// max s s.t. v_i + <M_i, W> + s <= 0, <P_j, W> = e_j, tr W <= T, W psd.
/// W0 must satisfy the equality rows; it fixes the lower shift of s.
MaxSlack max_slack(int N, const std::vector<Matrix>& M, const Vector& v,
                   const std::vector<EqualityRow>& eq, const Matrix& W0,
                   const Options& opts, std::optional<double> s_max = {}) {
  const int I = static_cast<int>(M.size());
  const int E = static_cast<int>(eq.size());
  double worst = 0.0;
  double spread = 0.0;
  for (int i = 0; i < I; ++i) {
    const double val = v(i) + (M[i].array() * W0.array()).sum();
    worst = std::max(worst, val);
    spread = std::max(spread, std::abs(val));
  }
  const double s_lo = -worst - 1.0;
  const double sigma_cap =
      s_max ? *s_max - s_lo : 4.0 * (1.0 + spread) + 4.0 * std::abs(s_lo);

  // LP block: sigma, w_1..w_I, sigma slack, trace slack.
  const int L = I + 3;
  conic::Problem prob(N, L, I + E + 2);
  prob.c(0) = -1.0;
  for (int i = 0; i < I; ++i) {
    prob.A_psd[i] = M[i];
    prob.A_lp(i, 0) = 1.0;
    prob.A_lp(i, 1 + i) = 1.0;
    prob.b(i) = -v(i) - s_lo;
  }
  for (int j = 0; j < E; ++j) {
    prob.A_psd[I + j] = eq[j].P;
    prob.b(I + j) = eq[j].rhs;
  }
  const int rs = I + E;
  prob.A_lp(rs, 0) = 1.0;
  prob.A_lp(rs, I + 1) = 1.0;
  prob.b(rs) = sigma_cap;
  prob.A_psd[rs + 1] = Matrix::Identity(N, N);
  prob.A_lp(rs + 1, I + 2) = 1.0;
  prob.b(rs + 1) = opts.trace_cap;

  const conic::Solution sol = conic::solve(prob, opts.conic);
  MaxSlack out;
  out.status = sol.status;
  out.s = sol.x(0) + s_lo;
  out.W = sol.X;
  out.weights = -sol.y.head(I);
  out.weights = out.weights.cwiseMax(0.0);
  out.row_slack = sol.x.segment(1, I);
  out.slack_capped = sol.x(0) >= 0.99 * sigma_cap;
  out.trace_capped = N > 0 && sol.X.trace() >= 0.5 * opts.trace_cap;
  return out;
}

}  // namespace

MembershipResult sdp_membership(const Qcqp& p, const EpigraphPoint& pt,
                                const Options& opts) {
  const int n = p.n();
  if (pt.x.size() != n) throw DimensionError("sdp_membership: dimension mismatch");
  const Vector v = q_vector(p, pt);
  std::vector<Matrix> M;
  for (int i = 0; i <= p.m(); ++i) M.push_back(p.form(i).A());
  const MaxSlack ms = max_slack(n, M, v, {}, Matrix::Zero(n, n), opts);

  MembershipResult r;
  r.status = ms.status;
  r.margin = ms.s;
  r.member = ms.s >= -opts.membership_tol * p.scale();
  r.xi = ms.W;
  r.certificate = pt.x * pt.x.transpose() + ms.W;
  const double total = ms.weights.sum();
  r.separator = total > 0 ? Vector(ms.weights / total) : ms.weights;
  r.capped = ms.slack_capped || ms.trace_capped;
  return r;
}

FiberCenter fiber_center(const Qcqp& p, const EpigraphPoint& pt,
                         const Options& opts) {
  const int n = p.n();
  if (pt.x.size() != n) throw DimensionError("fiber_center: dimension mismatch");
  const Vector v = q_vector(p, pt);
  std::vector<Matrix> M;
  for (int i = 0; i <= p.m(); ++i) M.push_back(p.form(i).A());
  const MaxSlack ms = max_slack(n, M, v, {}, Matrix::Zero(n, n), opts, 0.0);
  FiberCenter fc;
  fc.status = ms.status;
  fc.s = ms.s;
  fc.xi = ms.W;
  fc.w = ms.row_slack;
  const double total = ms.weights.sum();
  fc.weights = total > 1e-6 ? Vector(ms.weights / total) : Vector(Vector::Zero(v.size()));
  return fc;
}

EpigraphValue epigraph_value(const Qcqp& p, const Vector& x, const Options& opts) {
  const int n = p.n();
  const int m = p.m();
  if (x.size() != n) throw DimensionError("epigraph_value: dimension mismatch");
  const Vector qv = q_values(p, x);

  std::vector<Matrix> M;
  for (int i = 1; i <= m; ++i) M.push_back(p.form(i).A());
  const MaxSlack feas = max_slack(n, M, qv.tail(m), {}, Matrix::Zero(n, n), opts);
  EpigraphValue out;
  if (feas.status != conic::Status::Optimal) return out;
  if (feas.s < -opts.membership_tol * p.scale()) {
    out.kind = EpigraphValue::Kind::PlusInfinity;
    return out;
  }
  const double relax = std::max(0.0, -feas.s);

  // min <A_obj, xi> s.t. <A_i, xi> + w_i = -q_i(x) + relax, tr xi <= T.
  conic::Problem prob(n, m + 1, m + 1);
  prob.C = p.objective().A();
  for (int i = 0; i < m; ++i) {
    prob.A_psd[i] = p.form(i + 1).A();
    prob.A_lp(i, i) = 1.0;
    prob.b(i) = -qv(i + 1) + relax;
  }
  prob.A_psd[m] = Matrix::Identity(n, n);
  prob.A_lp(m, m) = 1.0;
  prob.b(m) = opts.trace_cap;
  const conic::Solution sol = conic::solve(prob, opts.conic);
  if (sol.status != conic::Status::Optimal) return out;

  out.xi = sol.X;
  out.gamma = (-sol.y.head(m)).cwiseMax(0.0);
  out.value = qv(0) + sol.primal_objective;
  const bool capped = sol.X.trace() >= 0.5 * opts.trace_cap;
  out.dual_unattained = capped || out.gamma.norm() > 1e6;
  out.kind = (capped && out.value < -1e3 * p.scale())
                 ? EpigraphValue::Kind::MinusInfinity
                 : EpigraphValue::Kind::Finite;
  return out;
}

SdpSolution solve_relaxation(const Qcqp& p, const std::optional<Vector>& direction,
                             const Options& opts) {
  const int n = p.n();
  const int m = p.m();
  Vector d = Vector::Zero(n + 1);
  d(n) = 2.0;
  if (direction) {
    if (direction->size() != n + 1) {
      throw DimensionError("solve_relaxation: direction must have length n+1");
    }
    d = *direction;
  }
  SdpSolution out;
  const double dt = d(n);
  if (dt < -1e-14) {
    out.status = Status::Unbounded;
    return out;
  }

  // Strict feasibility probe on the constraint rows.
  std::vector<Matrix> Q;
  for (int i = 1; i <= m; ++i) Q.push_back(p.form(i).homogenized());
  Matrix E00 = Matrix::Zero(n + 1, n + 1);
  E00(0, 0) = 1.0;
  const MaxSlack feas =
      max_slack(n + 1, Q, Vector::Zero(m), {{E00, 1.0}}, E00, opts);
  if (feas.status != conic::Status::Optimal) return out;
  if (feas.s < -opts.membership_tol * p.scale()) {
    out.status = Status::Infeasible;
    return out;
  }

  conic::Problem prob(n + 1, m + 1, m + 2);
  prob.C = 0.5 * dt * p.objective().homogenized();
  for (int j = 0; j < n; ++j) {
    prob.C(0, j + 1) += 0.5 * d(j);
    prob.C(j + 1, 0) += 0.5 * d(j);
  }
  prob.A_psd[0] = E00;
  prob.b(0) = 1.0;
  for (int i = 0; i < m; ++i) {
    prob.A_psd[i + 1] = Q[i];
    prob.A_lp(i + 1, i) = 1.0;
  }
  prob.A_psd[m + 1] = Matrix::Identity(n + 1, n + 1);
  prob.A_lp(m + 1, m) = 1.0;
  prob.b(m + 1) = opts.trace_cap;

  const conic::Solution sol = conic::solve(prob, opts.conic);
  out.iterations = sol.iterations;
  if (sol.status != conic::Status::Optimal) return out;
  if (sol.X.trace() >= 0.5 * opts.trace_cap) {
    out.status = Status::Unbounded;
    return out;
  }
  const Matrix& Z = sol.X;
  const double z00 = Z(0, 0);
  out.x = Z.block(1, 0, n, 1) / z00;
  out.X = Z.block(1, 1, n, n);
  out.t = 0.5 * (p.objective().homogenized().array() * Z.array()).sum();
  out.objective = d.head(n).dot(out.x) + dt * out.t;
  out.psd_dual = sol.S;
  Vector g = (-sol.y.segment(1, m)).cwiseMax(0.0);
  if (dt > 1e-14) {
    out.gamma = {1.0, g / (0.5 * dt)};
  } else {
    out.gamma = {0.0, g};
  }
  out.status = Status::Optimal;
  return out;
}

SupportResult support(const Qcqp& p, const Vector& d, const Options& opts) {
  SupportResult out;
  if (d.size() != p.n() + 1) throw DimensionError("support: direction length != n+1");
  const SdpSolution sol = solve_relaxation(p, Vector(-d), opts);
  out.status = sol.status;
  if (sol.status != Status::Optimal) return out;
  out.value = -sol.objective;
  out.argmax = {sol.x, sol.t};
  return out;
}

}  // namespace hullcert::sdp
