#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hgr/error.hpp"
#include "hgr/hgr_oracle.hpp"
#include "test_support.hpp"

namespace hgr {
namespace {

Eigen::MatrixXd random_table(Eigen::Index nx, Eigen::Index ny, Rng& rng, double zero_fraction = 0.0) {
  Eigen::MatrixXd t(nx, ny);
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < ny; ++j) t(i, j) = rng.uniform() < zero_fraction ? 0.0 : rng.uniform(0.01, 1.0);
  return t / t.sum();
}

void expect_feasible_witness(const GenericJoint& j, const HgrResult& r) {
  const Eigen::VectorXd px = j.x_marginal(), py = j.y_marginal();
  EXPECT_NEAR(px.dot(r.f_star), 0.0, 1e-8);
  EXPECT_NEAR(py.dot(r.g_star), 0.0, 1e-8);
  EXPECT_NEAR(px.dot(r.f_star.cwiseAbs2()), 1.0, 1e-8);
  EXPECT_NEAR(py.dot(r.g_star.cwiseAbs2()), 1.0, 1e-8);
  EXPECT_NEAR(r.f_star.dot(j.prob() * r.g_star), r.rho, 1e-8);
}

TEST(GenericJoint, Validation) {
  EXPECT_THROW(GenericJoint(Eigen::MatrixXd::Constant(2, 2, 0.3)), Error);
  Eigen::MatrixXd neg(1, 2);
  neg << 1.5, -0.5;
  EXPECT_THROW(GenericJoint{neg}, Error);
  EXPECT_THROW(GenericJoint(Eigen::MatrixXd(0, 0)), Error);
}

TEST(HgrSvd, ProductIsZero) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index nx = 2 + rng.index(6), ny = 2 + rng.index(6);
    const Eigen::MatrixXd a = random_table(nx, 1, rng), b = random_table(1, ny, rng);
    const auto r = hgr_svd(GenericJoint(a * b, 1e-12));
    EXPECT_EQ(r.rho, 0.0);
  }
  EXPECT_EQ(hgr_svd(GenericJoint(Eigen::MatrixXd::Constant(2, 2, 0.25))).rho, 0.0);
}

TEST(HgrSvd, BijectionIsOne) {
  EXPECT_NEAR(hgr_svd(flatten(copy_fixture())).rho, 1.0, 1e-12);
  Rng rng(2);
  for (int n = 2; n <= 8; ++n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = n - 1; k > 0; --k) std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(rng.index(k + 1))]);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd w = random_table(n, 1, rng);
    for (int i = 0; i < n; ++i) t(i, perm[static_cast<std::size_t>(i)]) = w(i, 0);
    EXPECT_NEAR(hgr_svd(GenericJoint(t, 1e-12)).rho, 1.0, 1e-10);
  }
}

TEST(HgrSvd, NonTightFixture) {
  const GenericJoint j = flatten(nontight_fixture());
  const auto r = hgr_svd(j);
  EXPECT_NEAR(r.rho, std::sqrt(0.065 / 0.24), 1e-12);
  EXPECT_NEAR(r.rho, testing::correlation_ratio(nontight_fixture()), 1e-12);
  expect_feasible_witness(j, r);
}

TEST(HgrSvd, WitnessFeasibility) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const GenericJoint j(random_table(2 + rng.index(7), 2 + rng.index(7), rng, 0.2), 1e-12);
    const auto r = hgr_svd(j);
    if (r.degenerate) continue;
    EXPECT_GE(r.rho, 0.0);
    EXPECT_LE(r.rho, 1.0);
    expect_feasible_witness(j, r);
  }
}

TEST(HgrSvd, ZeroRowsAndColumnsDropped) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 3);
  t(0, 0) = 0.25;
  t(2, 2) = 0.25;
  t(0, 2) = 0.25;
  t(2, 0) = 0.25;
  const auto r = hgr_svd(GenericJoint(t));
  EXPECT_EQ(r.rho, 0.0);
  EXPECT_FALSE(r.x_support[1]);
  EXPECT_FALSE(r.y_support[1]);
  EXPECT_TRUE(r.x_support[2]);
}

TEST(HgrSvd, OnePointSupportIsFlagged) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3, 2);
  t(1, 0) = 0.4;
  t(1, 1) = 0.6;
  const auto r = hgr_svd(GenericJoint(t));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.rho, 0.0);
  EXPECT_EQ(r.f_star.size(), 0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(HgrSvd, PermutationInvariance) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index nx = 2 + rng.index(6), ny = 2 + rng.index(6);
    const Eigen::MatrixXd a = random_table(nx, ny, rng, 0.2);
    Eigen::MatrixXd b = a;
    for (Eigen::Index k = nx - 1; k > 0; --k) b.row(k).swap(b.row(rng.index(static_cast<int>(k) + 1)));
    for (Eigen::Index k = ny - 1; k > 0; --k) b.col(k).swap(b.col(rng.index(static_cast<int>(k) + 1)));
    EXPECT_NEAR(hgr_svd(GenericJoint(a, 1e-12)).rho, hgr_svd(GenericJoint(b, 1e-12)).rho, 1e-12);
  }
}

TEST(HgrSvd, RelabelingXVariablesLeavesRhoUnchanged) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const DiscreteJoint j = testing::random_joint(AlphabetSpec(2, 3), rng, 0.2);
    EXPECT_NEAR(hgr_svd(flatten(j)).rho, hgr_svd(flatten(relabel(j, t % 2, {1, 2, 0}))).rho, 1e-12);
  }
}

TEST(HgrBinary, Examples) {
  EXPECT_NEAR(hgr_binary(nontight_fixture()), std::sqrt(0.065 / 0.24), 1e-14);
  EXPECT_NEAR(hgr_binary(uniform_joint(AlphabetSpec(2, 3))), 0.0, 1e-15);
  EXPECT_NEAR(hgr_binary(copy_fixture()), 1.0, 1e-15);
  const auto j = joint_from_table(AlphabetSpec(1, 2), {{{0}, 0, 0.5}, {{1}, 0, 0.5}});
  try {
    hgr_binary(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateY);
  }
}

TEST(HgrBinary, AgreesWithSvdAndCorrelationRatio) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const DiscreteJoint j = testing::random_joint(AlphabetSpec(1 + t % 3, 2 + (t / 3) % 2), rng, 0.25);
    const double b = hgr_binary(j);
    EXPECT_NEAR(b, hgr_svd(flatten(j)).rho, 1e-10) << "trial " << t;
    EXPECT_NEAR(b, testing::correlation_ratio(j), 1e-12);
  }
}

TEST(Pearson, Examples) {
  const GenericJoint cp = flatten(copy_fixture());
  EXPECT_NEAR(pearson(cp, Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(pearson(GenericJoint(Eigen::MatrixXd::Constant(2, 2, 0.25)), Eigen::Vector2d(0, 1),
                      Eigen::Vector2d(0, 1)),
              0.0, 1e-15);
  EXPECT_THROW(pearson(cp, Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 1)), Error);
  EXPECT_THROW(pearson(cp, Eigen::Vector3d(0, 1, 2), Eigen::Vector2d(0, 1)), Error);
}

TEST(Pearson, NonTightFixtureFirstCoordinate) {
  // X_1 against Y from the (X_1, Y) table: P(X1=1,Y=1) = 0.2, P(X1=1) = 0.5, P(Y=1) = 0.6
  const double expect = (0.2 - 0.5 * 0.6) / std::sqrt(0.25 * 0.24);
  const GenericJoint j = flatten(nontight_fixture());
  const Eigen::Vector4d x1(0, 1, 0, 1);
  const double r = pearson(j, x1, Eigen::Vector2d(0, 1));
  EXPECT_NEAR(r, expect, 1e-14);
  EXPECT_LE(std::abs(r), hgr_svd(j).rho);
}

TEST(Pearson, NeverExceedsMaximalCorrelation) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index nx = 2 + rng.index(6), ny = 2 + rng.index(4);
    const GenericJoint j(random_table(nx, ny, rng, 0.1), 1e-12);
    const double rho = hgr_svd(j).rho;
    Eigen::VectorXd xv(nx), yv(ny);
    for (Eigen::Index k = 0; k < nx; ++k) xv(k) = rng.uniform(-3, 3);
    for (Eigen::Index k = 0; k < ny; ++k) yv(k) = rng.uniform(-3, 3);
    try {
      EXPECT_LE(std::abs(pearson(j, xv, yv)), rho + 1e-12);
    } catch (const Error&) {
      // a zero-variance embedding on a sparse table; nothing to compare
    }
  }
}

}  // namespace
}  // namespace hgr
