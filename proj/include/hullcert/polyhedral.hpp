#pragma once

#include <vector>

#include "hullcert/linalg.hpp"

namespace hullcert::poly {

using IndexSet = std::vector<int>;  // sorted

/// Extreme rays of the pointed cone {g : H g >= 0} by the double description
/// method. H must have full column rank. Rays are returned as unit columns.
Matrix extreme_rays(const Matrix& H, double tol = 1e-9);

/// A full-dimensional pointed polyhedral cone K in R^d, held in both
/// representations: K = cone(generators) = {g : facets * g >= 0}.
/// The polar K° = {v : <v, g> <= 0 for g in K} is generated by the negated
/// facet normals.
class PolyhedralCone {
 public:
  PolyhedralCone() = default;

  /// Redundant and parallel generators are dropped; the scaling of the kept
  /// columns is preserved. Throws PreconditionError when the span is not
  /// the whole space.
  static PolyhedralCone from_generators(const Matrix& G, double tol = 1e-9);
  static PolyhedralCone from_inequalities(const Matrix& H, double tol = 1e-9);

  int ambient() const { return static_cast<int>(generators_.rows()); }
  int num_generators() const { return static_cast<int>(generators_.cols()); }
  int num_facets() const { return static_cast<int>(facets_.rows()); }
  /// d x k, one generator per column.
  const Matrix& generators() const { return generators_; }
  /// f x d, one unit inward normal per row.
  const Matrix& facets() const { return facets_; }
  /// d x f, generators of the polar cone.
  Matrix polar_generators() const { return -facets_.transpose(); }

  bool contains(const Vector& v, double tol = 1e-9) const;
  bool polar_contains(const Vector& v, double tol = 1e-9) const;

  /// Facets tight at every generator in the set.
  IndexSet tight_facets(const IndexSet& gens) const;
  /// Generators tight on every facet in the set.
  IndexSet generators_on(const IndexSet& facets) const;
  /// Smallest face containing the listed generators.
  IndexSet closure(const IndexSet& gens) const;
  /// All faces as generator index sets, from {0} (empty set) to K.
  std::vector<IndexSet> faces() const;
  /// Conjugate of a face of K: the face of K° cut out by its span, given as
  /// facet indices (polar generator indices).
  IndexSet conjugate(const IndexSet& face) const { return tight_facets(face); }
  /// Conjugate of a face of K°, given as facet indices.
  IndexSet conjugate_polar(const IndexSet& polar_face) const {
    return generators_on(polar_face);
  }

  Matrix generator_columns(const IndexSet& set) const;
  Matrix polar_columns(const IndexSet& set) const;

 private:
  Matrix generators_;
  Matrix facets_;
  Eigen::MatrixXi incidence_;  // facets x generators, 1 when tight
  double tol_ = 1e-9;

  void build_incidence();
};

}  // namespace hullcert::poly
