#pragma once

#include <optional>
#include <string>

#include "hullcert/conic.hpp"
#include "hullcert/model.hpp"

namespace hullcert::sdp {

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };
std::string to_string(Status s);

struct Options {
  /// Trace bound that keeps every formulation compact; an active bound is
  /// reported as unboundedness.
  double trace_cap = 1e6;
  /// Membership margin threshold, relative to the problem scale.
  double membership_tol = 1e-7;
  conic::Options conic;
};

struct SdpSolution {
  Status status = Status::NumericalFailure;
  Vector x;
  Matrix X;
  double t = 0.0;
  /// <direction, (x, t)>; 2t for the default direction.
  double objective = 0.0;
  /// Constraint multipliers normalized to gamma_obj = 1 when the direction
  /// has a positive t-component.
  MultiplierPoint gamma;
  Matrix psd_dual;
  int iterations = 0;
};

/// Minimizes <direction, (x,t)> (default 2t) over the projected relaxation,
/// using Z = [[1, x'], [x, X]] psd.
SdpSolution solve_relaxation(const Qcqp& p,
                             const std::optional<Vector>& direction = std::nullopt,
                             const Options& opts = {});

/// Result of: max s s.t. v_i + <M_i, W> + s <= 0 (i in rows), W psd.
struct MaxSlack {
  conic::Status status = conic::Status::NumericalFailure;
  double s = 0.0;
  Matrix W;
  /// Dual multipliers of the rows, nonnegative, summing to 1 at an
  /// uncapped optimum.
  Vector weights;
  /// Row slacks -(v_i + <M_i, W> + s) >= 0.
  Vector row_slack;
  bool slack_capped = false;
  bool trace_capped = false;
};

struct MembershipResult {
  conic::Status status = conic::Status::NumericalFailure;
  bool member = false;
  /// Optimal slack; equals -max <g, v> over g in Gamma with sum(g) = 1.
  double margin = 0.0;
  /// X = xx' + xi witnessing membership.
  Matrix certificate;
  Matrix xi;
  /// Stacked (gamma_obj, gamma) in Gamma with unit sum; positive inner
  /// product with q(x) - 2t e_obj when not a member.
  Vector separator;
  bool capped = false;
};

MembershipResult sdp_membership(const Qcqp& p, const EpigraphPoint& pt,
                                const Options& opts = {});

/// Maximal-rank representation of v = q(x) - 2t e_obj as -(<A_i, xi> + w_i)
/// with xi psd and w >= 0, obtained from the interior point limit of the
/// max-slack problem with the slack capped at zero.
struct FiberCenter {
  conic::Status status = conic::Status::NumericalFailure;
  double s = 0.0;
  Matrix xi;
  Vector w;
  /// Unit-sum multipliers in Gamma orthogonal to v (zero vector when v is
  /// interior).
  Vector weights;
};

FiberCenter fiber_center(const Qcqp& p, const EpigraphPoint& pt,
                         const Options& opts = {});

struct EpigraphValue {
  enum class Kind { Finite, PlusInfinity, MinusInfinity, NumericalFailure };
  Kind kind = Kind::NumericalFailure;
  double value = 0.0;
  /// Maximizing multiplier gamma in Gamma_1 (finite case).
  Vector gamma;
  Matrix xi;
  /// Heuristic: the supremum over Gamma_1 looks unattained.
  bool dual_unattained = false;
  bool finite() const { return kind == Kind::Finite; }
};

/// sup over gamma in Gamma_1 of [gamma, q(x)].
EpigraphValue epigraph_value(const Qcqp& p, const Vector& x,
                             const Options& opts = {});

struct SupportResult {
  Status status = Status::NumericalFailure;
  double value = 0.0;
  EpigraphPoint argmax;
};

/// sup over the relaxation of <d, (x, t)>.
SupportResult support(const Qcqp& p, const Vector& d, const Options& opts = {});

}  // namespace hullcert::sdp
