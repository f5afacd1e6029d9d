#include "hullcert/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "hullcert/model.hpp"

namespace hullcert::poly {

namespace {

using Active = std::vector<char>;

bool subset(const Active& a, const Active& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

int count(const Active& a) {
  return static_cast<int>(std::count(a.begin(), a.end(), 1));
}

/// Keeps the first of every group of positively parallel columns.
Matrix dedupe_columns(const Matrix& R, double tol) {
  std::vector<int> keep;
  for (int j = 0; j < R.cols(); ++j) {
    const Vector a = R.col(j).normalized();
    bool dup = false;
    for (int k : keep) {
      if ((a - R.col(k).normalized()).norm() <= std::sqrt(tol)) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(j);
  }
  Matrix out(R.rows(), static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) out.col(j) = R.col(keep[j]);
  return out;
}

}  // namespace

Matrix extreme_rays(const Matrix& H_in, double tol) {
  const int d = static_cast<int>(H_in.cols());
  std::vector<Vector> rows;
  for (int i = 0; i < H_in.rows(); ++i) {
    const double nr = H_in.row(i).norm();
    if (nr > tol) rows.push_back(H_in.row(i).transpose() / nr);
  }
  const int p = static_cast<int>(rows.size());

  // Initial simplicial cone from d independent rows.
  std::vector<int> basis_rows;
  Matrix K(0, d);
  for (int i = 0; i < p && static_cast<int>(basis_rows.size()) < d; ++i) {
    Matrix trial(K.rows() + 1, d);
    trial << K, rows[i].transpose();
    if (linalg::numerical_rank(trial, 1e-10) == trial.rows()) {
      K = trial;
      basis_rows.push_back(i);
    }
  }
  if (static_cast<int>(basis_rows.size()) < d) {
    throw PreconditionError("extreme_rays: inequality matrix lacks full column rank");
  }
  const Matrix Kinv = K.inverse();

  std::vector<Vector> rays;
  std::vector<Active> active;
  std::vector<char> processed(p, 0);
  for (int i : basis_rows) processed[i] = 1;
  for (int j = 0; j < d; ++j) {
    rays.push_back(Kinv.col(j).normalized());
    Active a(p, 0);
    for (int k = 0; k < d; ++k) {
      if (k != j) a[basis_rows[k]] = 1;
    }
    active.push_back(a);
  }

  for (int h = 0; h < p; ++h) {
    if (processed[h]) continue;
    const Vector& row = rows[h];
    std::vector<int> pos, zero, neg;
    std::vector<double> val(rays.size());
    for (size_t r = 0; r < rays.size(); ++r) {
      val[r] = row.dot(rays[r]);
      if (val[r] > tol) pos.push_back(static_cast<int>(r));
      else if (val[r] < -tol) neg.push_back(static_cast<int>(r));
      else zero.push_back(static_cast<int>(r));
    }
    std::vector<Vector> next_rays;
    std::vector<Active> next_active;
    for (int r : pos) {
      next_rays.push_back(rays[r]);
      next_active.push_back(active[r]);
    }
    for (int r : zero) {
      next_rays.push_back(rays[r]);
      Active a = active[r];
      a[h] = 1;
      next_active.push_back(a);
    }
    for (int i : pos) {
      for (int j : neg) {
        Active z(p, 0);
        for (int k = 0; k < p; ++k) z[k] = active[i][k] && active[j][k];
        if (count(z) < d - 2) continue;
        bool adjacent = true;
        for (size_t k = 0; k < rays.size() && adjacent; ++k) {
          if (static_cast<int>(k) == i || static_cast<int>(k) == j) continue;
          if (subset(z, active[k])) adjacent = false;
        }
        if (!adjacent) continue;
        Vector nr = val[i] * rays[j] - val[j] * rays[i];
        next_rays.push_back(nr.normalized());
        z[h] = 1;
        next_active.push_back(z);
      }
    }
    rays = std::move(next_rays);
    active = std::move(next_active);
    processed[h] = 1;
  }

  Matrix R(d, static_cast<int>(rays.size()));
  for (size_t j = 0; j < rays.size(); ++j) R.col(j) = rays[j];
  return dedupe_columns(R, tol);
}

PolyhedralCone PolyhedralCone::from_generators(const Matrix& G_in, double tol) {
  const int d = static_cast<int>(G_in.rows());
  std::vector<int> nonzero;
  for (int j = 0; j < G_in.cols(); ++j) {
    if (G_in.col(j).norm() > tol) nonzero.push_back(j);
  }
  Matrix G(d, static_cast<int>(nonzero.size()));
  for (size_t j = 0; j < nonzero.size(); ++j) G.col(j) = G_in.col(nonzero[j]);
  if (linalg::numerical_rank(G, 1e-10) < d) {
    throw PreconditionError("PolyhedralCone: generators do not span the space");
  }
  PolyhedralCone cone;
  cone.tol_ = tol;
  cone.facets_ = extreme_rays(G.transpose(), tol).transpose();

  // Keep extreme generators only: tight facets must have rank d - 1.
  std::vector<int> keep;
  for (int j = 0; j < G.cols(); ++j) {
    const Vector g = G.col(j).normalized();
    std::vector<int> tight;
    for (int f = 0; f < cone.facets_.rows(); ++f) {
      if (std::abs(cone.facets_.row(f).dot(g)) <= std::sqrt(tol)) tight.push_back(f);
    }
    Matrix T(static_cast<int>(tight.size()), d);
    for (size_t k = 0; k < tight.size(); ++k) T.row(k) = cone.facets_.row(tight[k]);
    if (linalg::numerical_rank(T, 1e-8) == d - 1) keep.push_back(j);
  }
  Matrix kept(d, static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) kept.col(j) = G.col(keep[j]);
  cone.generators_ = dedupe_columns(kept, tol);
  cone.build_incidence();
  return cone;
}

PolyhedralCone PolyhedralCone::from_inequalities(const Matrix& H, double tol) {
  const Matrix R = extreme_rays(H, tol);
  return from_generators(R, tol);
}

void PolyhedralCone::build_incidence() {
  incidence_.resize(num_facets(), num_generators());
  for (int f = 0; f < num_facets(); ++f) {
    for (int g = 0; g < num_generators(); ++g) {
      const double val = facets_.row(f).dot(generators_.col(g));
      incidence_(f, g) = std::abs(val) <= std::sqrt(tol_) * generators_.col(g).norm();
    }
  }
}

bool PolyhedralCone::contains(const Vector& v, double tol) const {
  return (facets_ * v).minCoeff() >= -tol * std::max(1.0, v.norm());
}

bool PolyhedralCone::polar_contains(const Vector& v, double tol) const {
  return (generators_.transpose() * v).maxCoeff() <=
         tol * std::max(1.0, v.norm()) * generators_.colwise().norm().maxCoeff();
}

IndexSet PolyhedralCone::tight_facets(const IndexSet& gens) const {
  IndexSet out;
  for (int f = 0; f < num_facets(); ++f) {
    bool all = true;
    for (int g : gens) {
      if (!incidence_(f, g)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(f);
  }
  return out;
}

IndexSet PolyhedralCone::generators_on(const IndexSet& facets) const {
  IndexSet out;
  for (int g = 0; g < num_generators(); ++g) {
    bool all = true;
    for (int f : facets) {
      if (!incidence_(f, g)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(g);
  }
  return out;
}

IndexSet PolyhedralCone::closure(const IndexSet& gens) const {
  return generators_on(tight_facets(gens));
}

std::vector<IndexSet> PolyhedralCone::faces() const {
  IndexSet all(num_generators());
  for (int g = 0; g < num_generators(); ++g) all[g] = g;
  std::set<IndexSet> seen{all};
  std::deque<IndexSet> queue{all};
  while (!queue.empty()) {
    const IndexSet face = queue.front();
    queue.pop_front();
    for (int f = 0; f < num_facets(); ++f) {
      IndexSet sub;
      for (int g : face) {
        if (incidence_(f, g)) sub.push_back(g);
      }
      if (sub.size() == face.size()) continue;
      sub = closure(sub);
      if (seen.insert(sub).second) queue.push_back(sub);
    }
  }
  std::vector<IndexSet> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

Matrix PolyhedralCone::generator_columns(const IndexSet& set) const {
  Matrix out(ambient(), static_cast<int>(set.size()));
  for (size_t j = 0; j < set.size(); ++j) out.col(j) = generators_.col(set[j]);
  return out;
}

Matrix PolyhedralCone::polar_columns(const IndexSet& set) const {
  Matrix out(ambient(), static_cast<int>(set.size()));
  for (size_t j = 0; j < set.size(); ++j) out.col(j) = -facets_.row(set[j]).transpose();
  return out;
}

}  // namespace hullcert::poly
