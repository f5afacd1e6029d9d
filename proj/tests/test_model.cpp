#include <gtest/gtest.h>

#include "corpus.hpp"
#include "hullcert/model.hpp"

using namespace hullcert;

TEST(Model, EvaluateAndHomogenize) {
  corpus::Rng r(1);
  const QuadraticForm q(r.sym(3), r.vec(3), 0.7);
  const Vector x = r.vec(3);
  Matrix Z(4, 4);
  Z << 1, x.transpose(), x, x * x.transpose();
  EXPECT_NEAR(evaluate(q, x), (q.homogenized().cwiseProduct(Z)).sum(), 1e-12);
  EXPECT_NEAR(evaluate(q, x), x.dot(q.A() * x) + 2 * q.b().dot(x) + q.c(), 1e-12);
}

TEST(Model, RejectsAsymmetry) {
  Matrix A(2, 2);
  A << 1, 2, 2.1, 1;
  EXPECT_THROW(QuadraticForm(A, Vector::Zero(2), 0), std::invalid_argument);
}

TEST(Model, AggregationIsLinear) {
  const Qcqp p = corpus::random_feasible(5, 3).problem;
  corpus::Rng r(2);
  Vector g(p.m() + 1);
  for (int i = 0; i <= p.m(); ++i) g(i) = r.uniform(0, 2);
  const Vector x = r.vec(p.n());
  const QuadraticForm agg = aggregate(p, g);
  EXPECT_NEAR(evaluate(agg, x), g.dot(q_values(p, x)), 1e-10);
  Vector one(p.m() + 1);
  one << 1, g.tail(p.m());
  EXPECT_NEAR(lagrangian_value(p, g.tail(p.m()), x), one.dot(q_values(p, x)), 1e-10);
}

TEST(Model, QVectorAndResidual) {
  Matrix A = Matrix::Identity(1, 1);
  const Qcqp p(QuadraticForm(-A, Vector::Zero(1), 0), {QuadraticForm(A, Vector::Zero(1), -1)});
  const EpigraphPoint in{Vector::Constant(1, 0.5), -0.125};
  EXPECT_TRUE(feasibility_residual(p, in).in_s);
  const Vector v = q_vector(p, in);
  EXPECT_NEAR(v(0), -0.25 + 0.25, 1e-15);
  EXPECT_NEAR(v(1), -0.75, 1e-15);
  const EpigraphPoint out{Vector::Constant(1, 2.0), 0};
  EXPECT_FALSE(feasibility_residual(p, out).in_s);
  EXPECT_NEAR(feasibility_residual(p, out).violation, 3.0, 1e-12);
}

TEST(Model, StructureDetection) {
  const Qcqp k = corpus::kronecker(4);
  EXPECT_EQ(k.structure().kind, Structure::Kind::Kronecker);
  EXPECT_TRUE(verify_structure(k, k.structure()));
  Matrix D = Matrix::Zero(2, 2);
  D.diagonal() << 1, -1;
  const Qcqp d(QuadraticForm(D, Vector::Zero(2), 0), {QuadraticForm(-D, Vector::Zero(2), -1)});
  EXPECT_EQ(d.structure().kind, Structure::Kind::Diagonal);
  EXPECT_TRUE(is_diagonal(d));
  const Qcqp g = corpus::two_constraint(1, corpus::LinearKind::Zero);
  EXPECT_THROW(Qcqp(g.objective(), g.constraints(), Structure::kronecker(1, 2)),
               std::invalid_argument);
}

TEST(Model, DimensionMismatch) {
  EXPECT_THROW(Qcqp(QuadraticForm::zero(2), {QuadraticForm::zero(3)}), std::invalid_argument);
}
