#include <gtest/gtest.h>

#include "corpus.hpp"
#include "hullcert/certify.hpp"
#include "hullcert/rounding.hpp"

using namespace hullcert;

namespace {

Qcqp trs() {
  const Matrix I = Matrix::Identity(1, 1);
  return Qcqp(QuadraticForm(-I, Vector::Zero(1), 0), {QuadraticForm(I, Vector::Zero(1), -1)});
}

}  // namespace

TEST(Rounding, TrustRegionSubspace) {
  const Qcqp p = trs();
  const gamma::GammaDescription d = gamma::describe(p);
  const EpigraphPoint pt{Vector::Zero(1), -0.5};
  const gamma::FaceData fd = gamma::face_at(p, d, pt);
  const auto R = rounding::rounding_subspace(p, fd, pt, rounding::Method::Polyhedral);
  ASSERT_EQ(R.basis.dim(), 1);
  // ker A[1] is all of R and b = 0, so R' = {(x', 0)}.
  EXPECT_NEAR(std::abs(R.basis.column(0)(0)), 1.0, 1e-12);
  const auto step = rounding::validate_direction(p, pt, R.basis.column(0));
  EXPECT_NEAR(step.epsilon(), 1.0, 1e-6);
  EXPECT_NEAR(step.alpha_minus, step.alpha_plus, 1e-6);
}

TEST(Rounding, TrustRegionDecomposition) {
  const Qcqp p = trs();
  const EpigraphPoint pt{Vector::Zero(1), -0.5};
  const auto r = rounding::decompose(p, gamma::describe(p), pt);
  ASSERT_EQ(r.status, rounding::DecomposeStatus::Success);
  ASSERT_EQ(r.decomposition.points.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(std::abs(r.decomposition.points[i].x(0)), 1.0, 1e-6);
    EXPECT_NEAR(r.decomposition.weights[i], 0.5, 1e-6);
  }
  EXPECT_TRUE(rounding::decomposition_valid(p, pt, r.decomposition));
}

TEST(Rounding, VerticalRaySplit) {
  const Qcqp p = trs();
  // Outside S (q_obj(0.5)/2 = -0.125) and above the relaxation epigraph
  // value -0.5 at x = 0.5, so 0.2 of t is a vertical ray.
  const EpigraphPoint pt{Vector::Constant(1, 0.5), -0.3};
  const auto r = rounding::decompose(p, gamma::describe(p), pt);
  ASSERT_EQ(r.status, rounding::DecomposeStatus::Success);
  EXPECT_NEAR(r.decomposition.vertical_ray, 0.2, 1e-6);
  EXPECT_TRUE(rounding::decomposition_valid(p, pt, r.decomposition));
  for (const auto& q : r.decomposition.points) {
    EXPECT_TRUE(feasibility_residual(p, q, 1e-6).in_s);
  }
}

TEST(Rounding, MethodsAgreeAndStepsAreSymmetric) {
  for (int seed = 0; seed < 10; ++seed) {
    const Qcqp p = corpus::two_constraint(200 + seed, corpus::LinearKind::Shift);
    const gamma::GammaDescription d = gamma::polyhedral_description(p);
    for (const EpigraphPoint& pt : certify::boundary_samples(p, 3, seed)) {
      const gamma::FaceData fd = gamma::face_at(p, d, pt);
      const auto Rp = rounding::rounding_subspace(p, fd, pt, rounding::Method::Polyhedral);
      const auto Re = rounding::rounding_subspace(p, fd, pt, rounding::Method::Exposed);
      EXPECT_LE(linalg::projector_distance(Rp.basis, Re.basis), 1e-7);
      for (int j = 0; j < Rp.basis.dim(); ++j) {
        const Vector u = Rp.basis.column(j);
        EXPECT_TRUE(rounding::verify_quadratic_system(p, pt, fd.G_perp, u).ok);
        const auto a = rounding::validate_direction(p, pt, u);
        const auto b = rounding::validate_direction(p, pt, -u);
        EXPECT_GT(a.epsilon(), 0.0);
        EXPECT_NEAR(a.alpha_plus, b.alpha_minus, 1e-6 * std::max(1.0, a.alpha_plus));
        EXPECT_NEAR(a.alpha_minus, b.alpha_plus, 1e-6 * std::max(1.0, a.alpha_minus));
        rounding::ValidateOptions po;
        po.oracle = rounding::Oracle::Polyhedral;
        const auto c = rounding::validate_direction(p, pt, u, po, &d);
        EXPECT_NEAR(c.epsilon(), a.epsilon(), 1e-5 * std::max(1.0, a.epsilon()));
      }
    }
  }
}

TEST(Rounding, NonExactPointHasTrivialSubspace) {
  Matrix A1(2, 2), A2(2, 2);
  A1 << 1, 0, 0, -1;
  A2 << -1, 0, 0, 3;
  Vector b(2);
  b << 1, 0;
  const Qcqp p(QuadraticForm::zero(2),
               {QuadraticForm(A1, b, -1), QuadraticForm(A2, Vector::Zero(2), -1)});
  const EpigraphPoint w{Eigen::Vector2d(0, 1), 0};
  const gamma::GammaDescription d = gamma::describe(p);
  const gamma::FaceData fd = gamma::face_at(p, d, w);
  EXPECT_TRUE(rounding::rounding_subspace(p, fd, w, rounding::Method::Polyhedral).trivial());
  EXPECT_TRUE(rounding::rounding_subspace(p, fd, w, rounding::Method::Exposed).trivial());
  const auto r = rounding::decompose(p, d, w);
  EXPECT_EQ(r.status, rounding::DecomposeStatus::NotExact);
}

TEST(Rounding, QmpDirectionRankOneCase) {
  // r = 1: the direction is w (x) y with y a scalar, so it is proportional to
  // the block weights; it must be a feasible two-sided step.
  for (int seed = 0; seed < 30; ++seed) {
    const Qcqp p = corpus::kronecker(seed);
    const std::vector<EpigraphPoint> pts = certify::boundary_samples(p, 2, seed);
    for (const EpigraphPoint& pt : pts) {
      const rounding::QmpDirection q = rounding::qmp_rounding_direction(p, pt);
      EXPECT_NEAR(q.direction.norm(), 1.0, 1e-9);
      EXPECT_GT(rounding::validate_direction(p, pt, q.direction).epsilon(), 0.0)
          << "seed " << seed;
      if (p.structure().r == 1 && q.w.norm() > 1e-9) {
        EXPECT_EQ(q.y.size(), 1);
        EXPECT_LE((q.direction.head(p.n()).normalized().cwiseAbs() -
                   q.w.normalized().cwiseAbs())
                      .norm(),
                  1e-9);
      }
    }
  }
}
