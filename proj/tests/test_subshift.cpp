#include <gtest/gtest.h>

#include <cmath>

#include "defectkin/errors.hpp"
#include "defectkin/subshift.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

MarkovShift golden() { return MarkovShift(A2, {{0, 0}, {0, 1}, {1, 0}}); }

}  // namespace

TEST(Alphabet, ParseAndFormat) {
  const Word w = A2.parse("0110");
  EXPECT_EQ(w, (Word{0, 1, 1, 0}));
  EXPECT_EQ(A2.format(w), "0110");
  EXPECT_THROW(A2.parse("012"), Error);
}

TEST(Alphabet, MultiCharLabels) {
  const Alphabet A({"a", "bb", "c"});
  EXPECT_FALSE(A.single_char());
  EXPECT_EQ(A.index_of("bb"), 1u);
  EXPECT_THROW(A.index_of("d"), Error);
  EXPECT_THROW(Alphabet({"a", "a"}), Error);
}

TEST(MarkovShift, EdgesAndAdmissibility) {
  const MarkovShift g = golden();
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_FALSE(g.has_edge(1, 1));
  EXPECT_TRUE(is_admissible(g, A2.parse("01001")));
  EXPECT_FALSE(is_admissible(g, A2.parse("0110")));
  EXPECT_TRUE(is_cyclically_admissible(g, A2.parse("010")));
  EXPECT_FALSE(is_cyclically_admissible(g, A2.parse("101")));
}

TEST(MarkovShift, EmptyShiftRejected) { EXPECT_THROW(MarkovShift(A2, {{0, 1}}), EmptySubshift); }

TEST(MarkovShift, FromCycles) {
  const MarkovShift c = MarkovShift::from_cycles(A2, {A2.parse("01")});
  EXPECT_EQ(c.edges().size(), 2u);
  EXPECT_TRUE(is_union_of_cycles(c));
  EXPECT_EQ(period_of(c), 2);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(entropy(MarkovShift::full(A2)), 1.0, 1e-12);
  EXPECT_NEAR(entropy(golden()), std::log2((1 + std::sqrt(5.0)) / 2), 1e-9);
  EXPECT_EQ(entropy(MarkovShift(A2, {{0, 0}})), 0.0);
  EXPECT_NEAR(spectral_radius(MarkovShift::full(Alphabet::numeric(3))), 3.0, 1e-9);
}

TEST(Entropy, ChoicePointAndCycles) {
  EXPECT_TRUE(choice_point(golden()).has_value());
  EXPECT_FALSE(choice_point(MarkovShift::from_cycles(A2, {A2.parse("01")})).has_value());
  const CyclePair cp = equal_length_cycles(golden());
  EXPECT_EQ(cp.c0.size(), cp.c1.size());
  EXPECT_NE(cp.c0, cp.c1);
  EXPECT_EQ(cp.c0.front(), cp.c1.front());
  EXPECT_TRUE(is_cyclically_admissible(golden(), cp.c0));
  EXPECT_TRUE(is_cyclically_admissible(golden(), cp.c1));
  EXPECT_THROW(equal_length_cycles(MarkovShift(A2, {{0, 0}})), NoChoicePoint);
}

TEST(Components, SplitsDisjointCycles) {
  const MarkovShift s = MarkovShift::from_cycles(A2, {A2.parse("0"), A2.parse("1")});
  EXPECT_EQ(transitive_components(s).size(), 2u);
  EXPECT_EQ(strongly_connected_components(s).size(), 2u);
  EXPECT_FALSE(period_of(golden()).has_value());
}

TEST(Regularity, FullShift) {
  const RegularityReport r = regularity(MarkovShift::full(A2));
  EXPECT_TRUE(r.left_regular);
  EXPECT_TRUE(r.right_regular);
}

TEST(SFT, PrunesInessentialWords) {
  // 011 has no extension on the left inside {000, 001, 011}: 0->0->1->1 dead ends.
  const SFT s(A2, 3, {A2.parse("000"), A2.parse("001"), A2.parse("011")});
  EXPECT_TRUE(s.contains(A2.parse("000")));
  EXPECT_FALSE(s.contains(A2.parse("011")));
}

TEST(SFT, FromPeriodicAndMarkovRecoding) {
  const SFT g = SFT::from_periodic(A2, {A2.parse("0"), A2.parse("1"), A2.parse("01")}, 3);
  EXPECT_EQ(g.admissible().size(), 4u);  // 000 111 010 101
  const Recoded r = sft_to_markov(g);
  EXPECT_EQ(r.coder.length(), 3);
  EXPECT_EQ(r.shift.vertices().size(), 4u);
}

TEST(BlockCoder, HigherBlockRoundTrip) {
  const Recoded r = higher_block(golden(), 3);
  const Word w = A2.parse("0100101000");
  const Word code = r.coder.encode(w);
  EXPECT_EQ(code.size(), w.size() - 2);
  EXPECT_TRUE(is_admissible(r.shift, code));
  EXPECT_EQ(r.coder.decode(code), w);
}

TEST(BlockCoder, HigherPowerRoundTrip) {
  const Recoded r = higher_power(MarkovShift::full(A2), 2);
  const Word w = A2.parse("011011");
  const Word code = r.coder.encode(w);
  EXPECT_EQ(code.size(), 3u);
  EXPECT_EQ(r.coder.decode(code), w);
  EXPECT_EQ(r.coder.encode(w, 1).size(), 2u);
}

TEST(Perron, GoldenMeanEigenvalue) {
  const PerronData p = perron(golden());
  EXPECT_NEAR(p.lambda, (1 + std::sqrt(5.0)) / 2, 1e-12);
}
