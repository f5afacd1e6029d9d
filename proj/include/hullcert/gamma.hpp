#pragma once

#include <optional>
#include <string>

#include "hullcert/model.hpp"
#include "hullcert/polyhedral.hpp"
#include "hullcert/sdp.hpp"

namespace hullcert::gamma {

struct DefiniteWitness {
  bool ok = false;
  /// max of min_eig(A[gamma]) over the box.
  double lambda = 0.0;
  /// gamma in R^m_+ with A[gamma] = A_obj + sum gamma_i A_i.
  Vector gamma;
  /// True when the maximizer touches the box bound.
  bool at_box = false;
  conic::Status status = conic::Status::NumericalFailure;
  Vector stacked() const;
};

/// max lambda s.t. A_obj + sum gamma_i A_i - lambda I psd, 0 <= gamma <= box.
DefiniteWitness check_assumption_definite(const Qcqp& p, double box = 1e3,
                                          const conic::Options& opts = {});

bool gamma_membership(const Qcqp& p, const MultiplierPoint& g, double tol = 1e-9);
bool gamma_membership(const Qcqp& p, const Vector& stacked, double tol = 1e-9);

struct PencilInterval {
  double s_lo = 0.0;
  double s_hi = 0.0;
  /// Endpoint rays in R^2_+, scaled to small integers when rational.
  Vector gamma1;
  Vector gamma2;
  bool degenerate = false;
};

/// For q_obj = 0 and m = 2: the interval of s in [0, 1] with
/// s A_1 + (1 - s) A_2 psd, by bisection on the minimum eigenvalue.
PencilInterval gamma1_generators_m2(const Qcqp& p);

enum class Kind { GeneralSpectrahedral, Polyhedral };
std::string to_string(Kind k);

struct GammaDescription {
  Kind kind = Kind::GeneralSpectrahedral;
  /// Stacked (1, gamma*) with A[gamma*] positive definite.
  Vector strict_point;
  double strict_lambda = 0.0;
  /// Polyhedral only. Generators scaled to (1, v) when gamma_obj > 0 and to
  /// unit norm otherwise.
  poly::PolyhedralCone cone;
  /// "diagonal", "pencil", "single" or "spectrahedral".
  std::string source = "spectrahedral";

  bool polyhedral() const { return kind == Kind::Polyhedral; }
  /// Vertices v_i of Gamma_1 (columns, m rows).
  Matrix vertices() const;
  /// Recession rays r_j of Gamma_1 (columns, m rows).
  Matrix rays() const;
};

/// True when the structure admits a polyhedral description of Gamma.
bool polyhedral_applicable(const Qcqp& p);

/// Throws PreconditionError when no polyhedral route applies or the
/// definiteness witness is missing.
GammaDescription polyhedral_description(const Qcqp& p);
/// Polyhedral when applicable, otherwise spectrahedral. Throws
/// PreconditionError without a definiteness witness.
GammaDescription describe(const Qcqp& p);

struct Face {
  enum class Of { Gamma, GammaPolar };
  Of of = Of::Gamma;
  Matrix generators;  // columns in R^{1+m}
  linalg::SubspaceBasis span;
  std::optional<Vector> rint_point;
  /// rint_point has gamma_obj = 1.
  bool normalized = false;
  std::optional<Vector> exposed_by;
  poly::IndexSet index;
  bool approximate = false;

  /// m-vector f with (1, f) = rint_point.
  Vector f() const;
};

struct FaceData {
  Vector v;  // q(x) - 2t e_obj
  double margin = 0.0;
  Face F;  // Gamma cap v-perp
  Face G;  // minimal face of the polar containing v
  linalg::SubspaceBasis G_perp;
  /// Spectrahedral route only: maximal-rank xi with v = -(A(xi) + w).
  Matrix lifted;
};

/// Face of Gamma exposed by q(x) - 2t e_obj and the minimal polar face.
/// Throws PreconditionError when the point is outside the relaxation.
FaceData face_at(const Qcqp& p, const GammaDescription& desc,
                 const EpigraphPoint& pt, const sdp::Options& opts = {});

/// Face of a polyhedral description from generator (or polar) indices.
Face face_from_index(const GammaDescription& desc, const poly::IndexSet& index,
                     Face::Of of);
/// Conjugate face; polyhedral descriptions only.
Face conjugate_face(const GammaDescription& desc, const Face& F);

/// -max over generators g of <g, v> / sum(g); matches the membership margin.
double polyhedral_margin(const GammaDescription& desc, const Vector& v);
/// max over Gamma_1 of [gamma, q(x)] from the generators; nullopt for +inf.
std::optional<double> polyhedral_epigraph_value(const Qcqp& p,
                                                const GammaDescription& desc,
                                                const Vector& x,
                                                double tol = 1e-9);

}  // namespace hullcert::gamma
