#include <gtest/gtest.h>

#include "defectkin/defect.hpp"
#include "defectkin/errors.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

WindowLanguage language_G() {
  return WindowLanguage::sft(SFT::from_periodic(A2, {A2.parse("0"), A2.parse("1"), A2.parse("01")}, 3));
}

MarkovShift g_star() { return MarkovShift::from_cycles(A2, {A2.parse("01")}); }
MarkovShift g01() { return MarkovShift::from_cycles(A2, {A2.parse("0"), A2.parse("1")}); }

}  // namespace

TEST(Locate, WidthZeroJunctionInGStar) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("00"), A2.parse("10"), 0);
  const auto iv = locate_defect(c, g_star());
  ASSERT_TRUE(iv.has_value());
  EXPECT_EQ(iv->width(), 0);
  EXPECT_EQ(iv->i, 0);  // transition between cells 0 and 1
}

TEST(Locate, AdmissibleHasNoDefect) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("01"), A2.parse("01"), 0);
  EXPECT_FALSE(locate_defect(c, g_star()).has_value());
}

TEST(Locate, BetaJunctionInG01) {
  const Configuration c = Configuration::periodic(A2.parse("0"), {}, A2.parse("1"), 0);
  const auto iv = locate_defect(c, g01());
  ASSERT_TRUE(iv.has_value());
  EXPECT_EQ(iv->width(), 0);
}

TEST(Locate, SeparatedRunsThrow) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("0011"), A2.parse("01"), 0);
  EXPECT_THROW(locate_defect(c, g_star()), MultipleDefects);
}

TEST(Centring, TiesFollowTheCeilingRule) {
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("0000"), A2.parse("0"), 0);
  for (std::int64_t w = 0; w <= 5; ++w) {
    const DefectRecord r = record_from_interval(c, {10, 10 + w}, 0);
    EXPECT_EQ(r.L, (w + 1) / 2 - 1);
    EXPECT_EQ(r.R, w / 2);
    EXPECT_TRUE(r.L == r.R || r.L == r.R - 1);
    EXPECT_EQ(r.z - r.L, 11);
  }
}

TEST(Track, GammaPlusMovesRight) {
  // 00 in G* moves right one cell per step.
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("00"), A2.parse("10"), 0);
  const DefectTrajectory tr = track(LocalRule::wolfram(184), language_G(), c, 100);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Particle);
  ASSERT_EQ(tr.records.size(), 101u);
  for (std::int64_t t = 0; t <= 100; ++t) EXPECT_EQ(tr.records[t].z, tr.records[0].z + t);
}

TEST(Track, BetaIsStationary) {
  const Configuration c = Configuration::periodic(A2.parse("0"), {}, A2.parse("1"), 0);
  const DefectTrajectory tr = track(LocalRule::wolfram(184), language_G(), c, 100);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Particle);
  for (const auto& r : tr.records) EXPECT_EQ(r.z, tr.records[0].z);
}

TEST(Track, OnesBeforeZerosSplit) {
  const Configuration c = Configuration::periodic(A2.parse("1"), {}, A2.parse("0"), 0);
  const DefectTrajectory tr = track(LocalRule::wolfram(184), language_G(), c, 20);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Split);
  EXPECT_LT(tr.verdict.value, 5);
}

TEST(Track, VanishingDefect) {
  // Rule 204 (identity) never moves anything; rule 0 erases everything.
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("1"), A2.parse("0"), 0);
  const MarkovShift zero(A2, {{0, 0}});
  const DefectTrajectory tr = track(LocalRule::wolfram(0), WindowLanguage::markov(zero), c, 10);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Vanished);
  EXPECT_EQ(tr.verdict.value, 1);
}

TEST(Track, BlightOnGrowingDefect) {
  // Rule 254 on 0-bar grows a solid block of ones.
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("1"), A2.parse("0"), 0);
  const MarkovShift zero(A2, {{0, 0}});
  const DefectTrajectory tr = track(LocalRule::wolfram(254), WindowLanguage::markov(zero), c, 100, 16);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Blight);
  EXPECT_LE(tr.verdict.value, 10);
}

TEST(Track, GappedGrowthSplits) {
  // Rule 30 leaves admissible 00 gaps inside its light cone.
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("1"), A2.parse("0"), 0);
  const MarkovShift zero(A2, {{0, 0}});
  const DefectTrajectory tr = track(LocalRule::wolfram(30), WindowLanguage::markov(zero), c, 100, 16);
  EXPECT_EQ(tr.verdict.kind, Verdict::Kind::Split);
}

TEST(Track, Reproducible) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("110"), A2.parse("01"), 3);
  const auto a = track(LocalRule::wolfram(184), language_G(), c, 50);
  const auto b = track(LocalRule::wolfram(184), language_G(), c, 50);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].z, b.records[i].z);
    EXPECT_EQ(a.records[i].d, b.records[i].d);
  }
  EXPECT_EQ(a.verdict, b.verdict);
}

TEST(VelocityBounds, HoldOnTrackedRuns) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("0"), A2.parse("1"), 0);
  const auto tr = track(LocalRule::wolfram(184), language_G(), c, 60);
  const VelocityBoundsCheck lc = check_velocity_bounds(tr);
  EXPECT_GT(lc.pairs, 0u);
  EXPECT_EQ(lc.violations_a, 0u);
  EXPECT_EQ(lc.violations_b, 0u);
}

TEST(Padding, WidthZeroPaddedToTwoCells) {
  const Configuration c = Configuration::periodic(A2.parse("01"), A2.parse("00"), A2.parse("10"), 0);
  const auto iv = locate_defect(c, g_star());
  const DefectRecord r = record_from_interval(c, *iv, 0);
  const DefectRecord p = pad_to_constant_width(r, c, 0, 1);
  EXPECT_EQ(p.z, r.z);
  EXPECT_EQ(p.d, A2.parse("00"));
  EXPECT_EQ(pad_to_constant_width(p, c, 0, 1).d, p.d);
}

TEST(Automaton, IdentityRuleIsStatic) {
  const MarkovShift zero(A2, {{0, 0}});
  const WindowLanguage lang = WindowLanguage::markov(zero);
  std::vector<Configuration> seeds;
  for (const char* core : {"1", "11", "101"})
    seeds.push_back(Configuration::periodic(A2.parse("0"), A2.parse(core), A2.parse("0"), 0));
  const DefectAutomaton a = extract_automaton(LocalRule::wolfram(204), lang, seeds, 10);
  EXPECT_FALSE(a.table().empty());
  for (const auto& [in, out] : a.table()) {
    EXPECT_EQ(out.velocity, 0);
    EXPECT_EQ(out.state, in.state);
  }
}

TEST(Automaton, Rule184GammaPlusVelocity) {
  const std::vector<Configuration> seeds = {
      Configuration::periodic(A2.parse("01"), A2.parse("00"), A2.parse("10"), 0)};
  const DefectAutomaton a = extract_automaton(LocalRule::wolfram(184), language_G(), seeds, 20);
  for (const auto& [in, out] : a.table()) EXPECT_EQ(out.velocity, 1);
}
