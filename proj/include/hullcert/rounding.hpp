#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hullcert/gamma.hpp"
#include "hullcert/sdp.hpp"

namespace hullcert::rounding {

enum class Method { Polyhedral, Exposed, QuadraticSystem };
std::string to_string(Method m);

/// Subspace of directions (x', t') in R^{n+1}.
struct RoundingSubspace {
  EpigraphPoint base;
  linalg::SubspaceBasis basis;
  Method method = Method::Polyhedral;
  /// f with (1, f) in the relative interior of the face.
  Vector f;
  bool trivial() const { return basis.trivial(); }
};

/// Polyhedral: x' in ker A[f] and <b(g), x'> = g_obj t' for every generator
/// g of F. Exposed: x' in ker A[f] and <A(u)x + b(u), x'> = u_obj t' for a
/// basis u of G-perp. QuadraticSystem is verification only; see
/// verify_quadratic_system.
RoundingSubspace rounding_subspace(const Qcqp& p, const gamma::FaceData& face,
                                   const EpigraphPoint& pt, Method method);

struct QuadraticCheck {
  bool ok = false;
  double worst_quadratic = 0.0;  // max |x'' A(u) x'| over the basis of G-perp
  double worst_linear = 0.0;     // max |<A(u)x + b(u), x'> - u_obj t'|
};

/// Checks both the quadratic and the linear conditions on a basis of G-perp,
/// relative to the data scale and |d|^2 (resp. |d|).
QuadraticCheck verify_quadratic_system(const Qcqp& p, const EpigraphPoint& pt,
                                       const linalg::SubspaceBasis& G_perp,
                                       const Vector& d, double tol = 1e-7);

enum class Oracle { Sdp, Polyhedral };

struct ValidateOptions {
  double epsilon_max = 1e3;
  double resolution = 1e-9;
  Oracle oracle = Oracle::Sdp;
  sdp::Options sdp;
};

struct StepInterval {
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  int evaluations = 0;
  double epsilon() const { return std::min(alpha_minus, alpha_plus); }
};

/// Largest steps with pt + a d (a in [-alpha_minus, alpha_plus]) in the
/// relaxation. The polyhedral oracle needs a polyhedral description.
StepInterval validate_direction(const Qcqp& p, const EpigraphPoint& pt, const Vector& d,
                                const ValidateOptions& opts = {},
                                const gamma::GammaDescription* desc = nullptr);

/// Membership margin of the relaxation at pt (sdp or polyhedral route).
double relaxation_margin(const Qcqp& p, const EpigraphPoint& pt, Oracle oracle,
                         const gamma::GammaDescription* desc,
                         const sdp::Options& opts, Vector* separator = nullptr);

struct QmpDirection {
  Vector direction;  // (w (x) y, t') normalized
  Vector w;          // unit length
  Vector y;
  double t_prime = 0.0;
  /// Sum of the endpoint offsets; the split is x + s (w (x) y) with
  /// s^2 - sigma s - 1 = 0.
  double sigma = 0.0;
  Matrix block_sum;  // sum of the diagonal blocks of the lifted certificate
  double s_plus() const;
  double s_minus() const;
};

/// Rounding direction for Kronecker-structured problems built from the
/// block average of the lifted certificate. Constraints tight at the lifted
/// point stay tight at both endpoints of the two-point split. A polyhedral
/// description, when given, supplies the face exactly.
QmpDirection qmp_rounding_direction(const Qcqp& p, const EpigraphPoint& pt,
                                    const sdp::Options& opts = {},
                                    const gamma::GammaDescription* desc = nullptr);

struct Decomposition {
  std::vector<EpigraphPoint> points;
  std::vector<double> weights;
  double vertical_ray = 0.0;
  double reconstruction_error = 0.0;
};

enum class DecomposeStatus { Success, NotExact, Inconclusive };
std::string to_string(DecomposeStatus s);

enum class DirectionRule { Auto, Rounding, Qmp };

struct DecomposeOptions {
  int depth_cap = -1;  // n + 2 when negative
  std::optional<std::uint64_t> seed;
  DirectionRule rule = DirectionRule::Auto;
  double leaf_tol = 1e-6;
  double witness_violation = 1e-4;
  sdp::Options sdp;
};

struct DecomposeResult {
  DecomposeStatus status = DecomposeStatus::Inconclusive;
  Decomposition decomposition;
  std::optional<EpigraphPoint> witness;
  std::string reason;
  int splits = 0;
};

/// Writes pt as a convex combination of points of S plus a multiple of
/// (0, 1), or returns an extreme point of the relaxation outside S.
DecomposeResult decompose(const Qcqp& p, const gamma::GammaDescription& desc,
                          const EpigraphPoint& pt, const DecomposeOptions& opts = {});

/// Recomputes the reconstruction error and checks the documented
/// invariants of a decomposition.
bool decomposition_valid(const Qcqp& p, const EpigraphPoint& pt, const Decomposition& d,
                         double tol = 1e-6);

}  // namespace hullcert::rounding
