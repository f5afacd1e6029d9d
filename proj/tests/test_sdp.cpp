#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "hullcert/oracle.hpp"
#include "hullcert/sdp.hpp"

using namespace hullcert;

namespace {

Qcqp trs() {
  const Matrix I = Matrix::Identity(1, 1);
  return Qcqp(QuadraticForm(-I, Vector::Zero(1), 0), {QuadraticForm(I, Vector::Zero(1), -1)});
}

}  // namespace

TEST(Sdp, TrustRegionValue) {
  const sdp::SdpSolution s = sdp::solve_relaxation(trs());
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  EXPECT_NEAR(s.objective, -1.0, 1e-6);
  EXPECT_NEAR(s.gamma.gamma(0), 1.0, 1e-5);
}

TEST(Sdp, InfeasibleDetected) {
  const Matrix I = Matrix::Identity(1, 1);
  const Qcqp p(QuadraticForm(I, Vector::Zero(1), 0), {QuadraticForm(I, Vector::Zero(1), 1)});
  EXPECT_EQ(sdp::solve_relaxation(p).status, sdp::Status::Infeasible);
}

TEST(Sdp, BallSupportIsRadius) {
  // x'x <= 4 with a zero objective; support along e_1 is 2.
  const Matrix I = Matrix::Identity(2, 2);
  const Qcqp p(QuadraticForm::zero(2), {QuadraticForm(I, Vector::Zero(2), -4)});
  Vector d = Vector::Zero(3);
  d(0) = 1;
  const sdp::SupportResult s = sdp::support(p, d);
  ASSERT_EQ(s.status, sdp::Status::Optimal);
  EXPECT_NEAR(s.value, 2.0, 1e-6);
}

TEST(Sdp, MembershipSeparatesAndContains) {
  const Qcqp p = trs();
  EXPECT_TRUE(sdp::sdp_membership(p, {Vector::Constant(1, 0.0), -0.5}).member);
  EXPECT_TRUE(sdp::sdp_membership(p, {Vector::Constant(1, 0.3), -0.4}).member);
  const sdp::MembershipResult out = sdp::sdp_membership(p, {Vector::Constant(1, 0.0), -0.6});
  EXPECT_FALSE(out.member);
  EXPECT_LT(out.margin, 0.0);
  ASSERT_EQ(out.separator.size(), 2);
  EXPECT_GT(out.separator.dot(q_vector(p, {Vector::Constant(1, 0.0), -0.6})), 0.0);
}

TEST(Sdp, ContainsLiftedFeasiblePoints) {
  for (int seed = 0; seed < 10; ++seed) {
    const corpus::FeasibleInstance inst = corpus::random_feasible(seed, 10);
    for (const Vector& x : inst.points) {
      const EpigraphPoint pt{x, 0.5 * evaluate(inst.problem.objective(), x)};
      EXPECT_TRUE(sdp::sdp_membership(inst.problem, pt).member) << "seed " << seed;
    }
  }
}

TEST(Sdp, RelaxationBoundsBruteForceMinimum) {
  for (int seed = 0; seed < 8; ++seed) {
    const Qcqp p = corpus::single_constraint(600 + seed);
    if (p.n() > 3) continue;
    const sdp::SdpSolution s = sdp::solve_relaxation(p);
    ASSERT_EQ(s.status, sdp::Status::Optimal);
    const double opt = oracle::global_min_bruteforce(p, oracle::Box::cube(p.n(), 4.0), 41);
    EXPECT_LE(s.objective, opt + 1e-6) << "seed " << seed;
  }
}

TEST(Sdp, EpigraphValueMatchesMembershipBoundary) {
  const Qcqp p = trs();
  const sdp::EpigraphValue e = sdp::epigraph_value(p, Vector::Constant(1, 0.2));
  ASSERT_TRUE(e.finite());
  // sup over gamma >= 1 of -x^2 + gamma (x^2 - 1) at x = 0.2 is at gamma = 1.
  EXPECT_NEAR(e.value, -1.0, 1e-6);
}
