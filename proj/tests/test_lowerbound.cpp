#include <gtest/gtest.h>

#include <cmath>

#include "hgr/error.hpp"
#include "hgr/hgr_oracle.hpp"
#include "hgr/lowerbound.hpp"
#include "hgr/numerics.hpp"
#include "test_support.hpp"

namespace hgr {
namespace {

QdSystem qd_of(const DiscreteJoint& j) { return assemble_qd(pairwise_from_joint(j)); }

AlphabetSpec small_spec(int t) { return AlphabetSpec(1 + t % 3, 2 + (t / 3) % 2); }

TEST(AssembleQd, UniformFixture) {
  const QdSystem s = qd_of(uniform_joint(AlphabetSpec(2, 2)));
  Eigen::Matrix4d expect;
  expect << .5, 0, .25, .25, 0, .5, .25, .25, .25, .25, .5, 0, .25, .25, 0, .5;
  EXPECT_LE((s.q - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(s.d.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(s.p_y1, 0.5);
}

TEST(AssembleQd, NonTightFixture) {
  const QdSystem s = qd_of(nontight_fixture());
  EXPECT_LE((s.d - Eigen::Vector4d(0.3, -0.1, 0.1, 0.1)).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::Matrix2d off;
  off << 0.1, 0.4, 0.4, 0.1;
  EXPECT_LE((s.q.topRightCorner(2, 2) - off).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((s.ew - Eigen::Vector4d::Constant(0.5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AssembleQd, CopyFixture) {
  const QdSystem s = qd_of(copy_fixture());
  EXPECT_EQ(s.q, Eigen::Matrix2d(Eigen::Vector2d(0.5, 0.5).asDiagonal()));
  EXPECT_EQ(s.d, Eigen::Vector2d(-0.5, 0.5));
}

TEST(AssembleQd, BlockColumnSumsEqualMarginals) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const QdSystem s = qd_of(testing::random_joint(small_spec(t), rng, 0.2));
    const int m = s.spec.m();
    for (int i = 0; i < s.spec.p(); ++i) {
      const Eigen::VectorXd col_sum = s.q.middleCols(Eigen::Index{i} * m, m).rowwise().sum();
      EXPECT_LE((col_sum - s.ew).cwiseAbs().maxCoeff(), 1e-14);
    }
    EXPECT_NEAR(s.ew.sum(), s.spec.p(), 1e-13);
  }
}

TEST(AssembleQd, RejectsInconsistentMarginals) {
  auto mg = pairwise_from_joint(nontight_fixture());
  mg.xy(0, 1) += 0.05;
  try {
    assemble_qd(mg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InconsistentMarginals);
  }
}

TEST(GammaLb, FixtureValues) {
  EXPECT_NEAR(gamma_lb_closed(qd_of(uniform_joint(AlphabetSpec(2, 2)))), 0.25, 1e-15);
  EXPECT_NEAR(gamma_lb_closed(qd_of(copy_fixture())), 0.0, 1e-15);
  EXPECT_NEAR(gamma_lb_closed(qd_of(nontight_fixture())), 0.1775, 1e-14);
}

TEST(GammaLb, MatchesAtomRegressionOracle) {
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    const DiscreteJoint j = testing::random_joint(small_spec(t), rng, 0.25);
    EXPECT_NEAR(gamma_lb_closed(qd_of(j)), testing::gamma_by_atom_regression(j), 1e-12) << "trial " << t;
  }
  const DiscreteJoint r2 = nontight_fixture();
  EXPECT_NEAR(testing::gamma_by_atom_regression(r2), 0.1775, 1e-14);
}

TEST(GammaLb, IterativeExamples) {
  const auto copy = gamma_lb_iterative(qd_of(copy_fixture()));
  EXPECT_EQ(copy.method, LowerBoundMethod::Iterative);
  EXPECT_NEAR(copy.gamma_lb, 0.0, 1e-15);
  EXPECT_LE((copy.z_star - Eigen::Vector2d(-0.5, 0.5)).norm(), 1e-14);

  const auto uni = gamma_lb_iterative(qd_of(uniform_joint(AlphabetSpec(2, 2))));
  EXPECT_NEAR(uni.gamma_lb, 0.25, 1e-15);
  EXPECT_LE(uni.z_star.norm(), 1e-15);

  const auto r2 = gamma_lb_iterative(qd_of(nontight_fixture()));
  EXPECT_NEAR(r2.gamma_lb, 0.1775, 1e-12);
  EXPECT_LE((r2.z_star - Eigen::Vector4d(0.3625, -0.2625, 0.2375, -0.1375)).norm(), 1e-10);
  EXPECT_NEAR(r2.z_star.dot(Eigen::Vector4d(1, 1, -1, -1)), 0.0, 1e-12);
}

TEST(GammaLb, ClosedAndIterativeAgree) {
  Rng rng(2025);
  for (int t = 0; t < 100; ++t) {
    const QdSystem s = qd_of(testing::random_joint(small_spec(t), rng, t % 2 ? 0.3 : 0.0));
    EXPECT_NEAR(gamma_lb_closed(s), gamma_lb_iterative(s).gamma_lb, 1e-10) << "trial " << t;
  }
}

TEST(GammaLb, RangeAndStationarity) {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const QdSystem s = qd_of(testing::random_joint(small_spec(t), rng, 0.2));
    const auto lb = lower_bound(s);
    EXPECT_GE(lb.gamma_lb, 0.0);
    EXPECT_LE(lb.gamma_lb, 0.25);
    EXPECT_LE((2.0 * s.q * lb.z_star - s.d).norm(), 1e-10);
    EXPECT_NEAR(s.objective(lb.z_star), lb.gamma_lb, 1e-12);
  }
}

TEST(GammaLb, DOutsideColumnSpace) {
  QdSystem s = qd_of(nontight_fixture());
  s.d += Eigen::Vector4d(1, 1, -1, -1) * 0.01;  // null direction of Q
  try {
    gamma_lb_closed(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DInconsistentWithQ);
  }
  EXPECT_THROW(gamma_lb_iterative(s), Error);
}

TEST(GammaLb, PseudoinverseIdentities) {
  Rng rng(606);
  for (int t = 0; t < 100; ++t) {
    const QdSystem s = qd_of(testing::random_joint(small_spec(t), rng, t % 3 == 0 ? 0.3 : 0.0));
    const Eigen::MatrixXd qp = pseudoinverse(s.q);
    const double p1 = s.p_y1, p0 = s.p_y0();
    EXPECT_NEAR(s.ew.dot(qp * s.ew), 1.0, 1e-8);
    EXPECT_NEAR(s.ew.dot(qp * s.d), p1 - p0, 1e-8);
    const Eigen::VectorXd d_prime = (s.d / 2.0 + (0.5 - p1) * s.ew) / std::sqrt(p0 * p1);
    EXPECT_NEAR(s.ew.dot(qp * d_prime), 0.0, 1e-8);
  }
}

TEST(GammaLb, SignOfLinearTermIrrelevant) {
  Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    const QdSystem s = qd_of(testing::random_joint(small_spec(t), rng));
    QdSystem flipped = s;
    flipped.d = -s.d;
    const auto a = lower_bound(s);
    const auto b = lower_bound(flipped);
    EXPECT_NEAR(a.gamma_lb, b.gamma_lb, 1e-12);
    EXPECT_LE((a.z_star + b.z_star).norm(), 1e-12);
    // z^T Q z + d^T z at -z* is the flipped objective at z*
    EXPECT_NEAR(flipped.objective(-a.z_star), a.gamma_lb, 1e-12);
  }
}

TEST(RhoLb, FixtureValues) {
  EXPECT_NEAR(rho_lb(qd_of(uniform_joint(AlphabetSpec(2, 2)))), 0.0, 1e-7);
  EXPECT_NEAR(rho_lb(qd_of(copy_fixture())), 1.0, 1e-15);
  EXPECT_NEAR(rho_lb(qd_of(nontight_fixture())), std::sqrt(1.0 - 0.1775 / 0.24), 1e-13);
  EXPECT_NEAR(rho_lb(qd_of(nontight_fixture())), 0.5103103630798286, 1e-13);
}

TEST(RhoLb, DegenerateY) {
  const auto j = joint_from_table(AlphabetSpec(1, 2), {{{0}, 1, 0.5}, {{1}, 1, 0.5}});
  try {
    rho_lb(qd_of(j));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateY);
  }
  EXPECT_TRUE(std::isnan(lower_bound(qd_of(j)).rho_lb));
}

TEST(RhoLb, NeverExceedsExactMaximalCorrelation) {
  Rng rng(777);
  for (int t = 0; t < 100; ++t) {
    const DiscreteJoint j = testing::random_joint(small_spec(t), rng, 0.3);
    EXPECT_LE(rho_lb(qd_of(j)), hgr_svd(flatten(j)).rho + 1e-9) << "trial " << t;
  }
}

TEST(RhoLb, RelabelingInvariance) {
  Rng rng(31415);
  for (int t = 0; t < 20; ++t) {
    const AlphabetSpec spec(2 + t % 2, 3);
    const DiscreteJoint j = testing::random_joint(spec, rng, 0.1);
    const std::vector<int> perm{1, 2, 0};
    const int var = t % spec.p();
    const QdSystem a = qd_of(j), b = qd_of(relabel(j, var, perm));
    const auto la = lower_bound(a), lb = lower_bound(b);
    EXPECT_NEAR(la.gamma_lb, lb.gamma_lb, 1e-12);
    EXPECT_NEAR(la.rho_lb, lb.rho_lb, 1e-12);
    for (int k = 0; k < 3; ++k)
      EXPECT_NEAR(la.z_star(var * 3 + k), lb.z_star(var * 3 + perm[static_cast<std::size_t>(k)]), 1e-10);
  }
}

TEST(DesignMatrix, Examples) {
  Eigen::MatrixXi x(2, 1);
  x << 0, 1;
  Eigen::VectorXi y(2);
  y << 0, 1;
  const auto ds = design_matrix(Dataset(AlphabetSpec(1, 2), x, y));
  EXPECT_EQ(ds.w, Eigen::Matrix2d::Identity());
  EXPECT_EQ(ds.b, Eigen::Vector2d(-0.5, 0.5));
  EXPECT_NEAR(lsq_objective(ds, Eigen::Vector2d(-0.5, 0.5)), 0.0, 0.0);
  EXPECT_DOUBLE_EQ(lsq_objective(ds, Eigen::Vector2d::Zero()), 0.5);

  Eigen::MatrixXi x2(1, 2);
  x2 << 1, 0;
  const auto ds2 = design_matrix(Dataset(AlphabetSpec(2, 2), x2, Eigen::VectorXi::Ones(1)));
  EXPECT_EQ(Eigen::RowVector4d(ds2.w.row(0)), Eigen::RowVector4d(0, 1, 1, 0));
  EXPECT_DOUBLE_EQ(ds2.b(0), 0.5);

  Rng rng(9);
  const auto big = design_matrix(testing::random_dataset(AlphabetSpec(3, 3), 40, rng));
  EXPECT_EQ(big.w.rowwise().sum(), Eigen::VectorXd::Constant(40, 3.0));
  EXPECT_DOUBLE_EQ(lsq_objective(big, Eigen::VectorXd::Zero(9)), 10.0);
  EXPECT_THROW(lsq_objective(big, Eigen::VectorXd::Zero(4)), Error);
}

TEST(DesignMatrix, EmpiricalQuadraticIdentity) {
  Rng rng(1001);
  for (int t = 0; t < 20; ++t) {
    const Dataset data = testing::random_dataset(AlphabetSpec(3, 3), 200, rng);
    const auto ds = design_matrix(data);
    const QdSystem s = assemble_qd(pairwise_from_dataset(data));
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd z(9);
      for (Eigen::Index c = 0; c < 9; ++c) z(c) = rng.uniform(-1, 1);
      EXPECT_NEAR(lsq_objective(ds, z) / 200.0, s.objective(z), 1e-12);
    }
  }
}

}  // namespace
}  // namespace hgr
