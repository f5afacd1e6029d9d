#include <gtest/gtest.h>

#include "corpus.hpp"
#include "hullcert/gamma.hpp"

using namespace hullcert;

namespace {

Qcqp diagonal_instance(std::uint64_t seed) {
  corpus::Rng r(seed);
  const int n = r.integer(2, 3), m = r.integer(1, 3);
  auto diag = [&](double lo, double hi) {
    Matrix D = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = r.uniform(lo, hi);
    return D;
  };
  std::vector<QuadraticForm> cons;
  Matrix agg = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    const Matrix D = diag(-1.5, 1.5);
    agg += r.uniform(0.3, 1.0) * D;
    cons.emplace_back(D, r.vec(n, 0.3), -r.uniform(0.5, 1.5));
  }
  return Qcqp(QuadraticForm(diag(0.5, 1.5) - agg, r.vec(n, 0.3), 0), cons);
}

}  // namespace

TEST(Gamma, DefiniteWitness) {
  const Qcqp p = corpus::single_constraint(3);
  const gamma::DefiniteWitness w = gamma::check_assumption_definite(p);
  ASSERT_TRUE(w.ok);
  EXPECT_GT(linalg::min_eig(aggregate(p, w.stacked()).A()), 0.0);
  EXPECT_NEAR(linalg::min_eig(aggregate(p, w.stacked()).A()), w.lambda, 1e-6);
}

TEST(Gamma, DiagonalConeMatchesMembership) {
  for (int seed = 0; seed < 20; ++seed) {
    const Qcqp p = diagonal_instance(seed);
    if (!gamma::check_assumption_definite(p).ok) continue;
    const gamma::GammaDescription d = gamma::polyhedral_description(p);
    EXPECT_EQ(d.source, "diagonal");
    corpus::Rng r(1000 + seed);
    for (int t = 0; t < 100; ++t) {
      Vector g(p.m() + 1);
      for (int i = 0; i <= p.m(); ++i) g(i) = r.uniform(0.0, 2.0);
      const double eig = linalg::min_eig(aggregate(p, g).A());
      if (std::abs(eig) < 1e-6) continue;
      EXPECT_EQ(d.cone.contains(g, 1e-9), eig > 0) << "seed " << seed;
      EXPECT_EQ(gamma::gamma_membership(p, g), eig > 0);
    }
  }
}

TEST(Gamma, PencilEndpointsAreTight) {
  for (int seed = 0; seed < 20; ++seed) {
    const Qcqp p = corpus::two_constraint(seed, corpus::LinearKind::Zero);
    const gamma::PencilInterval iv = gamma::gamma1_generators_m2(p);
    ASSERT_LE(iv.s_lo, iv.s_hi);
    const Matrix& A1 = p.constraint(1).A();
    const Matrix& A2 = p.constraint(2).A();
    auto pencil = [&](double s) { return linalg::min_eig(s * A1 + (1 - s) * A2); };
    EXPECT_GE(pencil(iv.s_lo), -1e-7);
    EXPECT_GE(pencil(iv.s_hi), -1e-7);
    EXPECT_GT(pencil(0.5 * (iv.s_lo + iv.s_hi)), 0.0);
    if (iv.s_lo > 1e-6) EXPECT_LT(pencil(iv.s_lo - 1e-4), 0.0);
    if (iv.s_hi < 1 - 1e-6) EXPECT_LT(pencil(iv.s_hi + 1e-4), 0.0);
    // Both constraints are nonconvex, so the interval is interior.
    EXPECT_GT(iv.s_lo, 0.0);
    EXPECT_LT(iv.s_hi, 1.0);
  }
}

TEST(Gamma, PolyhedralMarginMatchesSdp) {
  for (int seed = 0; seed < 10; ++seed) {
    const Qcqp p = corpus::two_constraint(100 + seed, corpus::LinearKind::Random);
    const gamma::GammaDescription d = gamma::polyhedral_description(p);
    corpus::Rng r(seed);
    for (int t = 0; t < 10; ++t) {
      const EpigraphPoint pt{r.vec(p.n()), r.uniform(-2, 2)};
      const double poly_margin = gamma::polyhedral_margin(d, q_vector(p, pt));
      const sdp::MembershipResult s = sdp::sdp_membership(p, pt);
      EXPECT_NEAR(poly_margin, s.margin, 1e-6 * p.scale()) << "seed " << seed;
    }
  }
}

TEST(Gamma, T1Generators) {
  Matrix A1(2, 2), A2(2, 2);
  A1 << 1, 0, 0, -1;
  A2 << -1, 0, 0, 3;
  const Qcqp p(QuadraticForm::zero(2),
               {QuadraticForm(A1, Vector::Zero(2), -1), QuadraticForm(A2, Vector::Zero(2), -1)});
  const gamma::GammaDescription d = gamma::polyhedral_description(p);
  ASSERT_TRUE(d.polyhedral());
  // Gamma_1 is generated by the rays (1, 1) and (3, 1) and Gamma by those
  // plus the objective direction.
  const Matrix G = d.cone.generators();
  auto has = [&](Vector g) {
    g.normalize();
    for (int j = 0; j < G.cols(); ++j)
      if ((G.col(j).normalized() - g).norm() < 1e-8) return true;
    return false;
  };
  EXPECT_EQ(G.cols(), 3);
  EXPECT_TRUE(has(Eigen::Vector3d(0, 1, 1)));
  EXPECT_TRUE(has(Eigen::Vector3d(0, 3, 1)));
  EXPECT_TRUE(has(Eigen::Vector3d(1, 0, 0)));
}

TEST(Gamma, FaceAtBoundaryPoint) {
  const Matrix I = Matrix::Identity(1, 1);
  const Qcqp p(QuadraticForm(-I, Vector::Zero(1), 0), {QuadraticForm(I, Vector::Zero(1), -1)});
  const gamma::GammaDescription d = gamma::describe(p);
  const gamma::FaceData fd = gamma::face_at(p, d, {Vector::Zero(1), -0.5});
  EXPECT_NEAR(fd.margin, 0.0, 1e-9);
  ASSERT_TRUE(fd.F.normalized);
  EXPECT_NEAR(fd.F.f()(0), 1.0, 1e-9);
  EXPECT_THROW(gamma::face_at(p, d, {Vector::Zero(1), -0.7}), PreconditionError);
}
