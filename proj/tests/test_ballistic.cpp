#include <gtest/gtest.h>

#include "defectkin/ballistic.hpp"
#include "defectkin/errors.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

WindowLanguage language_G() {
  return WindowLanguage::sft(SFT::from_periodic(A2, {A2.parse("0"), A2.parse("1"), A2.parse("01")}, 3));
}

}  // namespace

TEST(PeriodicCode, GStarUnder184Swaps) {
  const PeriodicCode code = build_periodic_code(MarkovShift::from_cycles(A2, {A2.parse("01")}), LocalRule::wolfram(184));
  ASSERT_EQ(code.size(), 2u);
  EXPECT_EQ(code.shift_perm()[0], 1u);
  EXPECT_EQ(code.shift_perm()[1], 0u);
  EXPECT_EQ(code.rule_perm()[0], 1u);
  EXPECT_EQ(code.rule_perm()[1], 0u);
  EXPECT_EQ(code.spatial_period(), 2);
  EXPECT_EQ(code.temporal_period(), 2);
}

TEST(PeriodicCode, FixedPointIsSingleton) {
  const PeriodicCode code = build_periodic_code(MarkovShift(A2, {{0, 0}}), LocalRule::wolfram(184));
  ASSERT_EQ(code.size(), 1u);
  EXPECT_EQ(code.shift_perm()[0], 0u);
  EXPECT_EQ(code.rule_perm()[0], 0u);
}

TEST(PeriodicCode, RejectsPositiveEntropy) {
  EXPECT_THROW(build_periodic_code(MarkovShift::full(A2), LocalRule::wolfram(184)), Error);
}

TEST(PeriodicCode, AdvanceComposesRuleThenShift) {
  const PeriodicCode code = build_periodic_code(MarkovShift::from_cycles(A2, {A2.parse("01")}), LocalRule::wolfram(184));
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(code.advance(s, 0), code.rule_perm()[s]);
    EXPECT_EQ(code.advance(s, 1), code.shift_perm()[code.rule_perm()[s]]);
  }
}

TEST(Classify, Rule184HasSevenPeriodOneTypes) {
  const LocalRule rule = LocalRule::wolfram(184);
  const WindowLanguage lang = language_G();
  const Classification c = classify(rule, lang, enumerate_seeds(rule, lang, 0));
  ASSERT_EQ(c.reports.size(), 7u);
  std::multiset<int> v;
  for (const auto& r : c.reports) {
    EXPECT_EQ(r.period, 1);
    v.insert(r.displacement);
  }
  EXPECT_EQ(v, (std::multiset<int>{-1, -1, -1, 0, 1, 1, 1}));
}

TEST(Classify, TypesAreConjugateToSimulation) {
  const LocalRule rule = LocalRule::wolfram(54);
  const WindowLanguage lang =
      WindowLanguage::sft(SFT::from_periodic(A2, {A2.parse("0001"), A2.parse("1110")}, 4));
  const Classification c = classify(rule, lang, enumerate_seeds(rule, lang, 0));
  ASSERT_FALSE(c.systems.empty());
  for (std::size_t s = 0; s < c.systems.size(); ++s)
    for (const ParticleType& t : c.types[s]) {
      EXPECT_TRUE(verify_conjugacy(c.systems[s], t));
      EXPECT_LE(std::abs(t.average_velocity()), 1.0);
    }
}

TEST(Classify, XiIsAPermutationOnItsCycles) {
  const LocalRule rule = LocalRule::wolfram(184);
  const WindowLanguage lang = language_G();
  const Classification c = classify(rule, lang, enumerate_seeds(rule, lang, 1));
  for (std::size_t s = 0; s < c.systems.size(); ++s) {
    std::set<std::size_t> on_cycles;
    for (const ParticleType& t : c.types[s])
      for (std::size_t i = 0; i < t.orbit.size(); ++i) {
        EXPECT_TRUE(on_cycles.insert(t.orbit[i]).second);
        EXPECT_EQ(c.systems[s].next(t.orbit[i]), t.orbit[(i + 1) % t.orbit.size()]);
      }
    for (const Transient& tr : c.transients[s]) {
      EXPECT_EQ(on_cycles.count(tr.state), 0u);
      EXPECT_GT(tr.depth, 0);
    }
  }
}

TEST(Predict, IntegratesVelocity) {
  ParticleType t;
  t.orbit = {0, 1};
  t.velocities = {1, 0};
  EXPECT_EQ(predict_trajectory(t, 0, 0, 5), (std::vector<std::int64_t>{0, 1, 1, 2, 2, 3}));
  EXPECT_EQ(predict_trajectory(t, 1, 10, 3), (std::vector<std::int64_t>{10, 10, 11, 11}));
  EXPECT_EQ(t.displacement(), 1);
  EXPECT_DOUBLE_EQ(t.average_velocity(), 0.5);
}

TEST(Predict, MatchesTrackedGammaPlus) {
  const LocalRule rule = LocalRule::wolfram(184);
  const WindowLanguage lang = language_G();
  const Classification c = classify(rule, lang, enumerate_seeds(rule, lang, 0));
  for (const TypeReport& r : c.reports) {
    const KinematicSystem& sys = c.systems[r.system];
    const ParticleType& t = c.types[r.system][r.type];
    const Configuration init = sys.realize(sys.state(t.orbit.front()), 0);
    const DefectTrajectory tr = track(rule, lang, init, 30);
    const auto z = predict_trajectory(t, 0, tr.records.front().z, 30);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(tr.records[i].z, z[i]);
  }
}
