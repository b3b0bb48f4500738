#include <gtest/gtest.h>

#include <algorithm>

#include "defectkin/ca.hpp"
#include "defectkin/errors.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

}  // namespace

TEST(LocalRule, WolframNumbering) {
  const LocalRule r = LocalRule::wolfram(110);
  // 110 = 01101110: 111->0 110->1 101->1 100->0 011->1 010->1 001->1 000->0
  EXPECT_EQ(r.at3(1, 1, 1), 0);
  EXPECT_EQ(r.at3(1, 1, 0), 1);
  EXPECT_EQ(r.at3(1, 0, 0), 0);
  EXPECT_EQ(r.at3(0, 0, 1), 1);
  EXPECT_EQ(r.at3(0, 0, 0), 0);
  EXPECT_THROW(LocalRule::wolfram(256), Error);
}

TEST(LocalRule, ApplyShortensByTwoRadii) {
  const LocalRule r = LocalRule::wolfram(184);
  EXPECT_EQ(r.apply(A2.parse("0110")), A2.parse("10"));
  EXPECT_EQ(r.apply_cyclic(A2.parse("01")), A2.parse("10"));
}

TEST(LocalRule, Linear) {
  const LocalRule r = LocalRule::linear({3, 1, 0, 2});
  const Word nb{2, 1, 2};
  EXPECT_EQ(r(nb), (2 + 2 * 2) % 3);
  EXPECT_EQ(r.alphabet().size(), 3u);
}

TEST(Apply, PeriodicConfigurationMatchesFiniteWord) {
  const LocalRule r = LocalRule::wolfram(30);
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("1"), A2.parse("0"), 0);
  Configuration x = c;
  for (int t = 0; t < 10; ++t) x = apply(r, std::move(x));
  Word w(41, 0);
  w[20] = 1;
  for (int t = 0; t < 10; ++t) w = r.apply(w);
  EXPECT_EQ(x.window(-10, 11), w);
}

TEST(Apply, ShiftConvention) {
  const Configuration c = Configuration::periodic(A2.parse("0"), A2.parse("1"), A2.parse("0"), 0);
  const Configuration s = shift(c, 1);
  EXPECT_EQ(s.at(-1), 1);
  EXPECT_EQ(s.at(0), 0);
  // Rule 170 is the left shift.
  EXPECT_EQ(apply(LocalRule::wolfram(170), c).window(-3, 3), s.window(-3, 3));
}

TEST(Invariance, GIsClosedUnder184) {
  const SFT g = SFT::from_periodic(A2, {A2.parse("0"), A2.parse("1"), A2.parse("01")}, 3);
  EXPECT_TRUE(check_invariance(LocalRule::wolfram(184), g));
  // Any radius-1 rule keeps period-2 points, so G is closed under 30 too.
  EXPECT_TRUE(check_invariance(LocalRule::wolfram(30), g));
  // Rule 30 sends (01)-bar to 1-bar, outside the golden mean shift.
  const SFT golden(A2, 2, {A2.parse("00"), A2.parse("01"), A2.parse("10")});
  EXPECT_TRUE(check_invariance(LocalRule::wolfram(204), golden));
  EXPECT_FALSE(check_invariance(LocalRule::wolfram(30), golden));
}

TEST(Permutative, Rule30And150) {
  const std::vector<Symbol> all{0, 1};
  EXPECT_TRUE(is_left_permutative(LocalRule::wolfram(30), all));
  EXPECT_FALSE(is_right_permutative(LocalRule::wolfram(30), all));
  EXPECT_TRUE(is_left_permutative(LocalRule::wolfram(150), all));
  EXPECT_TRUE(is_right_permutative(LocalRule::wolfram(150), all));
}

TEST(Resolving, XorIsResolvingOnFullShift) {
  const MarkovShift full = MarkovShift::full(A2);
  EXPECT_TRUE(is_left_resolving(LocalRule::wolfram(150), full));
  EXPECT_TRUE(is_right_resolving(LocalRule::wolfram(150), full));
  EXPECT_FALSE(right_resolving_witness(LocalRule::wolfram(150), full).has_value());
}

TEST(TravellingWaves, EtherOfRule110) {
  const auto found = find_travelling_wave_backgrounds(LocalRule::wolfram(110), 1, 4, 14);
  Word e = A2.parse("00010011011111");
  std::vector<Word> rots;
  for (std::size_t k = 0; k < e.size(); ++k) {
    std::rotate(e.begin(), e.begin() + 1, e.end());
    rots.push_back(e);
  }
  const Word least = *std::min_element(rots.begin(), rots.end());
  EXPECT_NE(std::find(found.begin(), found.end(), least), found.end());
}

TEST(Recode, PowerCoderConjugacy) {
  const LocalRule r = LocalRule::wolfram(110);
  const Recoded p = higher_power(MarkovShift::full(A2), 3);
  const LocalRule R = recode_rule(r, p.coder);
  EXPECT_EQ(R.radius(), 1);
  const Word w = A2.parse("011010011101000110");  // 6 blocks
  const Word img = R.apply(p.coder.encode(w));      // blocks 1..4
  const Word direct = r.apply(w);                   // cells 1..16
  EXPECT_EQ(p.coder.decode(img), Word(direct.begin() + 2, direct.begin() + 14));
}

TEST(PhiOrbits, RuleSwapsOnesAndZeros) {
  // Rule 51 (negation) maps 0-bar and 1-bar to each other.
  const MarkovShift s = MarkovShift::from_cycles(A2, {A2.parse("0"), A2.parse("1")});
  const auto orbits = phi_orbits_of_components(LocalRule::wolfram(51), s);
  ASSERT_EQ(orbits.size(), 1u);
  EXPECT_EQ(orbits[0].size(), 2u);
  EXPECT_EQ(phi_orbits_of_components(LocalRule::wolfram(204), s).size(), 2u);
}
