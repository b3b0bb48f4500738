#include <gtest/gtest.h>

#include <cmath>

#include "defectkin/diffusive.hpp"
#include "defectkin/errors.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

}  // namespace

TEST(Measure, ParryOnFullShiftIsUniform) {
  const MarkovMeasure mu = parry_measure(MarkovShift::full(A2));
  EXPECT_NEAR(mu.initial[0], 0.5, 1e-15);
  EXPECT_NEAR(mu.kernel[1][0], 0.5, 1e-15);
  EXPECT_NEAR(mu.cylinder(A2.parse("0110")), 1.0 / 16, 1e-15);
}

TEST(Measure, ParryGoldenMean) {
  const MarkovMeasure mu = parry_measure(MarkovShift(A2, {{0, 0}, {0, 1}, {1, 0}}));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(mu.kernel[0][0], 1 / phi, 1e-12);
  EXPECT_NEAR(mu.kernel[1][0], 1.0, 1e-12);
  EXPECT_LE(mu.stationarity_residual(), 1e-12);
  EXPECT_EQ(mu.cylinder(A2.parse("11")), 0.0);
  EXPECT_NEAR(mu.backward(0, 1), mu.initial[1] / mu.initial[0], 1e-12);
}

TEST(Measure, ParryNeedsIrreducibility) {
  EXPECT_THROW(parry_measure(MarkovShift::from_cycles(A2, {A2.parse("0"), A2.parse("1")})), Error);
}

TEST(Measure, PushforwardOfPermutativeRule) {
  const MarkovMeasure eta = parry_measure(MarkovShift::full(A2));
  EXPECT_NEAR(pushforward_cylinder(LocalRule::wolfram(90), eta, A2.parse("101")), 0.125, 1e-15);
  // Rule 0 sends everything to 0-bar.
  EXPECT_NEAR(pushforward_cylinder(LocalRule::wolfram(0), eta, A2.parse("00")), 1.0, 1e-15);
}

TEST(Seeds, DeriveSeedIsStableAndSpread) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_index(rng, 7), 7u);
}

TEST(Resolving, DiffuseExamplePasses) {
  const auto bg = diffuse_example_background();
  const ResolvingSystemReport r = verify_resolving_system(diffuse_example_rule(), bg, bg);
  EXPECT_TRUE(r.pass());
  ASSERT_TRUE(r.lambda && r.rho);
  EXPECT_NEAR(r.lambda->initial[0], 0.5, 1e-12);
}

TEST(Resolving, Rule184OnFullShiftFails) {
  const ResolvingSystemReport r = verify_resolving_system(LocalRule::wolfram(184), MarkovShift::full(A2), MarkovShift::full(A2));
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.parry.ok && r.left.ok && r.right.ok);
}

TEST(Kernel, RowsAreExactQuarters) {
  const auto bg = diffuse_example_background();
  const WalkKernel k = build_walk_kernel(diffuse_example_rule(), bg, bg, 1);
  EXPECT_EQ(k.size(), 64u);
  double init = 0.0;
  for (double p : k.initial()) init += p;
  EXPECT_NEAR(init, 1.0, 1e-12);
  for (std::size_t i = 0; i < k.size(); ++i) {
    Rational sum(0);
    for (const auto& [j, p] : k.row(i)) {
      EXPECT_EQ(p, Rational(1, 4));
      sum += p;
    }
    EXPECT_EQ(sum, Rational(1));
    EXPECT_GE(k.velocity(i), -1);
    EXPECT_LE(k.velocity(i), 1);
  }
}

TEST(Kernel, WidthLimit) {
  const auto bg = diffuse_example_background();
  EXPECT_THROW(build_walk_kernel(diffuse_example_rule(), bg, bg, 3), Error);
}

TEST(Kernel, StationaryDriftIsZero) {
  const auto bg = diffuse_example_background();
  const WalkKernel k = build_walk_kernel(diffuse_example_rule(), bg, bg, 1);
  const auto classes = stationary_and_drift(k);
  ASSERT_EQ(classes.size(), 1u);
  double total = 0.0;
  for (double p : classes[0].stationary) total += p;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_NEAR(classes[0].drift, 0.0, 1e-9);
}

TEST(Walks, DeterministicAcrossThreadCounts) {
  const auto bg = diffuse_example_background();
  const LocalRule rule = diffuse_example_rule();
  WalkOptions o;
  o.samples = 12;
  o.steps = 200;
  o.seed = 99;
  o.threads = 1;
  const WalkResult a = sample_walks(rule, bg, bg, 1, nullptr, o);
  o.threads = 4;
  const WalkResult b = sample_walks(rule, bg, bg, 1, nullptr, o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].z, b.samples[i].z);
  EXPECT_EQ(a.stats.drift, b.stats.drift);
  o.seed = 100;
  const WalkResult c = sample_walks(rule, bg, bg, 1, nullptr, o);
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) differs = differs || a.samples[i].z != c.samples[i].z;
  EXPECT_TRUE(differs);
}

TEST(Walks, StepsAreUnitAtMost) {
  const auto bg = diffuse_example_background();
  WalkOptions o;
  o.samples = 8;
  o.steps = 300;
  const WalkResult r = sample_walks(diffuse_example_rule(), bg, bg, 1, nullptr, o);
  for (const auto& s : r.samples)
    for (std::size_t t = 1; t < s.z.size(); ++t) EXPECT_LE(std::abs(s.z[t] - s.z[t - 1]), 1);
}

TEST(Walks, KernelChainMatchesCaStatistics) {
  const auto bg = diffuse_example_background();
  const LocalRule rule = diffuse_example_rule();
  const WalkKernel k = build_walk_kernel(rule, bg, bg, 1);
  WalkOptions o;
  o.samples = 200;
  o.steps = 500;
  const WalkResult ca = sample_walks(rule, bg, bg, 1, &k, o);
  const WalkResult chain = sample_kernel_walks(k, o);
  EXPECT_NEAR(ca.stats.variance_per_step, chain.stats.variance_per_step, 0.1);
  const MarkovTestReport mt = markov_property_test(ca, k);
  EXPECT_TRUE(mt.pass);
  EXPECT_LT(mt.weighted_tv, 0.05);
}

TEST(FixedSideWalk, FixedLeftBackground) {
  // Left side frozen to 0-bar, right side sampled: the walk still runs.
  const auto bg = diffuse_example_background();
  WalkOptions o;
  o.samples = 4;
  o.steps = 50;
  const WalkResult r = fixed_side_walk(diffuse_example_rule(), Side::Left, {Word{0}}, bg, 1, 1, 1, o);
  EXPECT_EQ(r.samples.size(), 4u);
  for (const auto& s : r.samples)
    if (!s.excluded) EXPECT_EQ(s.z.size(), 51u);
}

TEST(FixedSideWalk, RejectsNonPeriodicPoint) {
  const auto bg = diffuse_example_background();
  WalkOptions o;
  o.samples = 1;
  o.steps = 5;
  EXPECT_THROW(fixed_side_walk(diffuse_example_rule(), Side::Left, {Word{0}}, bg, 1, 0, 1, o), Error);
}
