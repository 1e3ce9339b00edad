#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hgr/error.hpp"
#include "hgr/hgr_oracle.hpp"
#include "hgr/lowerbound.hpp"
#include "hgr/tightness.hpp"
#include "test_support.hpp"

namespace hgr {
namespace {

QdSystem qd_of(const DiscreteJoint& j) { return assemble_qd(pairwise_from_joint(j)); }

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no hgr::Error thrown";
  return Errc::InvalidArgument;
}

TEST(HValue, Examples) {
  EXPECT_DOUBLE_EQ(h_value(Eigen::VectorXd::Zero(4), AlphabetSpec(2, 2)), 0.0);
  EXPECT_DOUBLE_EQ(h_value(Eigen::Vector2d(-0.5, 0.5), AlphabetSpec(1, 2)), 0.5);
  EXPECT_NEAR(h_value(Eigen::Vector4d(0.6, -0.025, 0.0, -0.375), AlphabetSpec(2, 2)), 0.6, 1e-15);
  EXPECT_NEAR(h_value(-Eigen::Vector4d(0.6, -0.025, 0.0, -0.375), AlphabetSpec(2, 2)), 0.4, 1e-15);
  EXPECT_EQ(error_code([] { h_value(Eigen::VectorXd::Zero(3), AlphabetSpec(2, 2)); }), Errc::DimensionMismatch);
}

TEST(CheckTightness, UniformFixture) {
  const auto cert = check_tightness(qd_of(uniform_joint(AlphabetSpec(2, 2))));
  EXPECT_TRUE(cert.tight());
  EXPECT_NEAR(cert.lp_value, 0.0, 1e-12);
  EXPECT_LE(cert.z_star.norm(), 1e-12);
  EXPECT_DOUBLE_EQ(cert.tol, kTightTol);
}

TEST(CheckTightness, CopyFixtureOnBoundary) {
  const auto cert = check_tightness(qd_of(copy_fixture()));
  EXPECT_TRUE(cert.tight());
  EXPECT_NEAR(cert.lp_value, 0.5, 1e-12);
  EXPECT_LE((cert.z_star - Eigen::Vector2d(-0.5, 0.5)).norm(), 1e-12);
  EXPECT_NEAR(cert.h_pos, 0.5, 1e-12);
  EXPECT_NEAR(cert.h_neg, 0.5, 1e-12);
}

// The minimizer set of the non-tight fixture quadratic is the line through
// (.6, -.025, 0, -.375) along (1, 1, -1, -1); scan it directly.
TEST(CheckTightness, NonTightFixtureAgainstLineScan) {
  const AlphabetSpec spec(2, 2);
  const Eigen::Vector4d base(0.6, -0.025, 0.0, -0.375);
  const Eigen::Vector4d dir(1, 1, -1, -1);
  double scan = std::numeric_limits<double>::infinity();
  for (int k = -40000; k <= 40000; ++k) {
    const Eigen::Vector4d z = base + (k * 1e-4) * dir;
    scan = std::min(scan, std::max(h_value(z, spec), h_value(-z, spec)));
  }
  EXPECT_NEAR(scan, 0.6, 1e-12);

  const QdSystem s = qd_of(nontight_fixture());
  EXPECT_LE((2.0 * s.q * base - s.d).norm(), 1e-14);
  const auto cert = check_tightness(s);
  EXPECT_FALSE(cert.tight());
  EXPECT_NEAR(cert.lp_value, 0.6, 1e-9);
  EXPECT_NEAR(cert.gamma_lb, 0.1775, 1e-12);
  EXPECT_LE((2.0 * s.q * cert.z_star - s.d).norm(), 1e-9);
  EXPECT_NEAR(std::max(cert.h_pos, cert.h_neg), cert.lp_value, 1e-9);
}

TEST(CheckTightness, DegenerateY) {
  const auto j = joint_from_table(AlphabetSpec(1, 2), {{{0}, 0, 0.5}, {{1}, 0, 0.5}});
  EXPECT_EQ(error_code([&] { check_tightness(qd_of(j)); }), Errc::DegenerateY);
}

TEST(CheckTightness, LpValueAtMostMinNormPoint) {
  Rng rng(10);
  for (int t = 0; t < 40; ++t) {
    const QdSystem s = qd_of(testing::random_joint(AlphabetSpec(2 + t % 2, 2 + t % 3 / 2), rng, 0.2));
    const auto lb = lower_bound(s);
    const auto cert = check_tightness(s);
    const double at_min_norm = std::max(h_value(lb.z_star, s.spec), h_value(-lb.z_star, s.spec));
    EXPECT_LE(cert.lp_value, at_min_norm + 1e-9);
    EXPECT_GE(cert.lp_value, 0.0);
    EXPECT_EQ(cert.tight(), cert.lp_value <= 0.5 + kTightTol);
  }
}

TEST(CheckTightness, VerdictSymmetryAndRelabeling) {
  Rng rng(123);
  int tight = 0, not_tight = 0;
  for (int t = 0; t < 60; ++t) {
    const AlphabetSpec spec(2, 3);
    const DiscreteJoint j = testing::random_joint(spec, rng, 0.3);
    const QdSystem s = qd_of(j);
    QdSystem flipped = s;
    flipped.d = -s.d;
    const auto a = check_tightness(s);
    const auto b = check_tightness(flipped);
    const auto c = check_tightness(qd_of(relabel(j, t % 2, {2, 0, 1})));
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.verdict, c.verdict);
    EXPECT_NEAR(a.lp_value, b.lp_value, 1e-9);
    EXPECT_NEAR(a.lp_value, c.lp_value, 1e-9);
    (a.tight() ? tight : not_tight)++;
  }
  // both verdicts should occur in a random sample
  EXPECT_GT(tight, 0);
  EXPECT_GT(not_tight, 0);
}

TEST(IsAdditive, NonTightFixtureIsNot) {
  const auto dec = is_additive(nontight_fixture());
  EXPECT_FALSE(dec.additive);
  EXPECT_GT(dec.residual, 1e-3);
}

TEST(IsAdditive, UniformQuarterTables) {
  const auto dec = is_additive(uniform_joint(AlphabetSpec(2, 2)));
  EXPECT_TRUE(dec.additive);
  EXPECT_NEAR(dec.residual, 0.0, 1e-15);
  EXPECT_LE((dec.f - Eigen::MatrixXd::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(IsAdditive, RecoversFixtureConditional) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AlphabetSpec spec(3, 3);
    const DiscreteJoint j = additive_fixture(spec, seed);
    const auto dec = is_additive(j);
    EXPECT_TRUE(dec.additive);
    const auto ct = conditional_expectation(j);
    for (Eigen::Index s = 0; s < spec.x_states(); ++s) EXPECT_NEAR(dec.evaluate(spec, s), ct.value(s), 1e-12);
  }
}

TEST(IsAdditive, AgreesWithVerdictOnSingletonClasses) {
  // One X variable: the pairwise tables are the whole joint.
  Rng rng(64);
  for (int t = 0; t < 20; ++t) {
    const DiscreteJoint j = testing::random_joint(AlphabetSpec(1, 2 + t % 4), rng, 0.3);
    EXPECT_EQ(is_additive(j).additive, check_tightness(qd_of(j)).tight());
  }
  const DiscreteJoint r2 = nontight_fixture();
  EXPECT_EQ(is_additive(r2).additive, check_tightness(qd_of(r2)).tight());
  const DiscreteJoint cp = copy_fixture();
  EXPECT_EQ(is_additive(cp).additive, check_tightness(qd_of(cp)).tight());
}

TEST(ConstructAdditive, UniformAndCopyReproduceBase) {
  const DiscreteJoint u = uniform_joint(AlphabetSpec(2, 2));
  const QdSystem su = qd_of(u);
  EXPECT_LE((construct_additive(Eigen::VectorXd::Zero(4), u, su).prob() - u.prob()).cwiseAbs().maxCoeff(), 1e-15);

  const DiscreteJoint c = copy_fixture();
  const QdSystem sc = qd_of(c);
  const DiscreteJoint star = construct_additive(Eigen::Vector2d(-0.5, 0.5), c, sc);
  EXPECT_LE((star.prob() - c.prob()).cwiseAbs().maxCoeff(), 1e-15);
  const auto ct = conditional_expectation(star);
  EXPECT_DOUBLE_EQ(ct.value(0), 0.0);
  EXPECT_DOUBLE_EQ(ct.value(1), 1.0);
}

TEST(ConstructAdditive, AdditiveFixturePipeline) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const AlphabetSpec spec(2 + static_cast<int>(seed % 2), 2 + static_cast<int>(seed / 2 % 2));
    const DiscreteJoint j = additive_fixture(spec, derive_seed(5, seed));
    const QdSystem s = qd_of(j);
    const auto cert = check_tightness(s);
    ASSERT_TRUE(cert.tight()) << "seed " << seed;
    const DiscreteJoint star = construct_additive(cert.z_star, j, s);

    const auto in = pairwise_from_joint(j), out = pairwise_from_joint(star);
    EXPECT_LE((in.xx - out.xx).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((in.xy - out.xy).cwiseAbs().maxCoeff(), 1e-12);

    const auto ct = conditional_expectation(star);
    const auto orig = conditional_expectation(j);
    for (Eigen::Index x = 0; x < spec.x_states(); ++x) {
      double zw = 0.0, f_sum = 0.0;
      for (int i = 0; i < spec.p(); ++i) {
        zw += cert.z_star(Eigen::Index{i} * spec.m() + spec.label(x, i));
        f_sum += cert.z_star(Eigen::Index{i} * spec.m() + spec.label(x, i)) + 0.5 / spec.p();
      }
      EXPECT_NEAR(ct.value(x), 0.5 + zw, 1e-10);
      EXPECT_NEAR(ct.value(x), f_sum, 1e-10);
      EXPECT_NEAR(ct.value(x), orig.value(x), 1e-9);
    }
    EXPECT_TRUE(is_additive(star, 1e-9).additive);
    EXPECT_NEAR(hgr_svd(flatten(star)).rho, rho_lb(s), 1e-8);
  }
}

TEST(ConstructAdditive, Errors) {
  const DiscreteJoint r2 = nontight_fixture();
  const QdSystem s = qd_of(r2);
  const Eigen::Vector4d z(0.6, -0.025, 0.0, -0.375);
  EXPECT_EQ(error_code([&] { construct_additive(z, r2, s); }), Errc::HConstraintViolated);
  EXPECT_EQ(error_code([&] { construct_additive(Eigen::Vector4d(0.1, 0, 0, 0), r2, s); }), Errc::NotStationary);
  EXPECT_EQ(error_code([&] { construct_additive(z, uniform_joint(AlphabetSpec(2, 2)), s); }), Errc::MarginalMismatch);
}

TEST(TightnessGap, Fixtures) {
  const auto r2 = tightness_gap(nontight_fixture());
  EXPECT_NEAR(r2.rho_oracle, std::sqrt(0.065 / 0.24), 1e-12);
  EXPECT_NEAR(r2.rho_lb, 0.5103103630798286, 1e-12);
  EXPECT_NEAR(r2.gap, std::sqrt(0.065 / 0.24) - 0.5103103630798286, 1e-12);
  EXPECT_GT(r2.gap, 0.0101);
  EXPECT_LT(r2.gap, 0.0102);

  const auto u = tightness_gap(uniform_joint(AlphabetSpec(2, 2)));
  EXPECT_NEAR(u.rho_oracle, 0.0, 1e-12);
  EXPECT_NEAR(u.rho_lb, 0.0, 1e-7);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = tightness_gap(additive_fixture(AlphabetSpec(3, 2), seed));
    EXPECT_LE(std::abs(g.gap), 1e-8);
  }
}

TEST(NearUniformProbe, Examples) {
  const AlphabetSpec spec(2, 2);
  EXPECT_DOUBLE_EQ(near_uniform_probe(spec, 0.0, 10, 1), 1.0);
  EXPECT_DOUBLE_EQ(near_uniform_probe(spec, 0.01, 100, 2024), 1.0);
  const DiscreteJoint extra[] = {nontight_fixture()};
  EXPECT_LT(near_uniform_probe(spec, 1.9, 20, 2024, extra), 1.0);
  EXPECT_DOUBLE_EQ(near_uniform_probe(spec, 0.01, 25, 3), near_uniform_probe(spec, 0.01, 25, 3));
}

}  // namespace
}  // namespace hgr
