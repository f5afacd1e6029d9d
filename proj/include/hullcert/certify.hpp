#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hullcert/gamma.hpp"
#include "hullcert/local_search.hpp"
#include "hullcert/rounding.hpp"

namespace hullcert::certify {

enum class Status { Exact, NotExact, SufficientHolds, Inconclusive };
enum class Grade { IffCertified, SufficientOnly, Empirical };
std::string to_string(Status s);
std::string to_string(Grade g);

/// Unset entries were not checked by the path that produced the verdict.
struct Assumptions {
  std::optional<bool> definite;
  std::optional<bool> primal_strict;
  std::optional<bool> nonconvex_constraints;
  std::optional<bool> facially_exposed;
};

/// Per-generator report of the two-constraint kernel test.
struct KernelReport {
  Vector gamma;  // generator of Gamma_1 in R^2_+
  bool interior = false;
  int kernel_dim = 0;
  /// ker(A[gamma]) cap b[gamma]-perp is nontrivial.
  bool condition = false;
  enum class Trigger { Vacuous, Found, NotFound, NotNeeded };
  Trigger trigger = Trigger::NotNeeded;
};
std::string to_string(KernelReport::Trigger t);

struct FaceReport {
  std::vector<int> generators;  // indices into the description's generators
  Vector f;
  int rounding_dim = 0;
  bool harmless = false;
  bool witness_found = false;
};

struct Evidence {
  std::optional<EpigraphPoint> witness;
  std::vector<KernelReport> kernel;
  std::vector<FaceReport> faces;
  int samples = 0;
  int samples_outside = 0;
  int samples_ok = 0;
  double worst_reconstruction = 0.0;
  double min_epsilon = 0.0;
};

struct Verdict {
  Status status = Status::Inconclusive;
  Grade grade = Grade::Empirical;
  std::string method;
  Evidence evidence;
  Assumptions assumptions;
  std::string reason;
};

struct Options {
  std::uint64_t seed = 1;
  search::StartBox box;
  int samples = 50;
  int qmp_samples = 20;
  int witness_starts = 128;
  /// Eigenvalue tolerance for nonconvexity and kernel tests.
  double tol = 1e-7;
  sdp::Options sdp;
};

Verdict two_constraint(const Qcqp& p, const Options& opts = {});
Verdict qmp(const Qcqp& p, const Options& opts = {});
Verdict polyhedral(const Qcqp& p, const Options& opts = {});
Verdict sampled(const Qcqp& p, const Options& opts = {});
/// two_constraint, polyhedral, qmp, then sampled; the first applicable path.
Verdict automatic(const Qcqp& p, const Options& opts = {});

struct WitnessCheck {
  bool ok = false;
  double margin = 0.0;
  double violation = 0.0;
  int rounding_dim = 0;
};
/// In the relaxation, outside S by at least 1e-4, and trivial rounding
/// subspace at the point.
WitnessCheck revalidate_witness(const Qcqp& p, const EpigraphPoint& w,
                                const sdp::Options& opts = {});

/// Points of the relaxation, off S, with t tightened to the epigraph value.
/// Mixtures of support points in random directions with negative t-part.
std::vector<EpigraphPoint> boundary_samples(const Qcqp& p, int count, std::uint64_t seed,
                                            const sdp::Options& opts = {});

}  // namespace hullcert::certify
