#include <gtest/gtest.h>

#include "defectkin/errors.hpp"
#include "defectkin/turing.hpp"

using namespace defectkin;

namespace {

const Alphabet A2 = Alphabet::numeric(2);

// Head 0 runs right flipping r1, head 1 runs left copying l1.
LRTuringMachine toy_machine() {
  const MarkovShift full = MarkovShift::full(A2);
  LRTuringMachine m{A2, 2, {"a", "b"}, {}, {}, {}, {}, {}, full, full};
  m.velocity = [](Symbol, HeadState d, Symbol) { return d == 0 ? 1 : -1; };
  m.tau_L = [](Symbol, Symbol l1, HeadState) { return l1; };
  m.tau_R = [](HeadState, Symbol r1, Symbol) { return r1; };
  m.tau_C = [](Symbol l1, HeadState d, Symbol r1) -> Symbol { return d == 0 ? (r1 ^ 1) : l1; };
  m.upsilon = [](Symbol l2, Symbol l1, HeadState d, Symbol r1, Symbol r2) -> HeadState {
    (void)l1;
    return d == 0 ? (r1 & r2) : (l2 ? 0 : 1);
  };
  return m;
}

ClassicalTM increment_tm() {
  ClassicalTM tm;
  tm.tape_symbols = 2;
  tm.states = 3;
  tm.state_labels = {"start", "carry", "halt"};
  tm.halt = 2;
  tm.write = {0, 1, 0, 1, 0, 1};
  tm.next = {1, 2, 2, 1, 1, 2};
  tm.move = {0, 0, 0, 0, -1, 0};
  // t=0: start->carry, carry writes 1 and halts; t=1: start->carry, carry writes 0 moves L.
  return tm;
}

}  // namespace

TEST(HalfTape, PushPopAndTail) {
  HalfTape t(Word{1, 0}, Word{0, 1});
  EXPECT_EQ(t.read(6), (Word{1, 0, 0, 1, 0, 1}));
  t.push_front(1);
  EXPECT_EQ(t.read(3), (Word{1, 1, 0}));
  EXPECT_EQ(t.pop_front(), 1);
  EXPECT_EQ(t.pop_front(), 1);
  EXPECT_EQ(t.pop_front(), 0);
  // Popping into the tail keeps its phase.
  EXPECT_EQ(t.read(4), (Word{0, 1, 0, 1}));
  EXPECT_EQ(t.pop_front(), 0);
  EXPECT_EQ(t.read(3), (Word{1, 0, 1}));
  t.set(5, 0);
  EXPECT_EQ(t.at(5), 0);
}

TEST(HalfTape, SameTapeComparesSequences) {
  EXPECT_TRUE(same_tape(HalfTape(Word{0, 1}, Word{0, 1}), HalfTape({}, Word{0, 1})));
  EXPECT_FALSE(same_tape(HalfTape(Word{1}, Word{0}), HalfTape({}, Word{0})));
  EXPECT_TRUE(same_tape(HalfTape({}, Word{0}), HalfTape(Word{0, 0, 0}, Word{0, 0})));
}

TEST(LRMachine, RestrictionsHoldForToy) { EXPECT_EQ(check_restrictions(toy_machine()), ""); }

TEST(LRMachine, RestrictionViolationReported) {
  LRTuringMachine m = toy_machine();
  m.upsilon = [](Symbol, Symbol, HeadState d, Symbol r1, Symbol r2) -> HeadState { return d == 1 ? (r1 & r2) : 0; };
  EXPECT_NE(check_restrictions(m), "");
}

TEST(LRMachine, StepMovesHead) {
  const LRTuringMachine m = toy_machine();
  MachineState s{HalfTape(Word{1, 1}, {0}), 0, HalfTape(Word{0, 1}, {0}), 5};
  const MachineState n = step_lrtm(m, s);
  EXPECT_EQ(n.z, 6);
  EXPECT_EQ(n.left.at(0), 1);  // the written cell, r1 flipped
  EXPECT_EQ(n.right.at(0), 1);
}

TEST(Compiled, CaStepBisimulatesMachine) {
  const LRTuringMachine m = toy_machine();
  const CompiledCA ca = turing_to_ca(m);
  EXPECT_EQ(ca.alphabet().size(), 2u + 2u * 2u);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Word ln(8), rn(8);
    for (auto& x : ln) x = static_cast<Symbol>(uniform_index(rng, 2));
    for (auto& x : rn) x = static_cast<Symbol>(uniform_index(rng, 2));
    MachineState s{HalfTape(ln, {0}), uniform_index(rng, 2), HalfTape(rn, {1, 0}), 0};
    Configuration c = ca.encode(s);
    for (int t = 0; t < 100; ++t) {
      s = step_lrtm(m, s);
      c = ca.step(c);
      ASSERT_TRUE(same_state(ca.decode(c), s)) << "trial " << trial << " t " << t;
    }
  }
}

TEST(Compiled, RoundTripThroughCaToTuring) {
  const LRTuringMachine m = toy_machine();
  const CompiledCA ca = turing_to_ca(m);
  const LocalRule rule = ca.to_local_rule();
  const MarkovShift full = MarkovShift::full(A2);
  // 36 letters and 1296 heads: too large for the exhaustive restriction check.
  const CAMachine cm = ca_to_turing(rule, ca.lifted(full), ca.lifted(full), 2);
  MachineState s{HalfTape(Word{1, 0, 1}, {0}), 1, HalfTape(Word{1, 1}, {1, 0}), 3};
  for (int t = 0; t < 60; ++t) {
    const MachineState sp = cm.psi(to_power(ca.encode(s), cm.power));
    const MachineState next = step_lrtm(m, s);
    const MachineState want = cm.psi(to_power(ca.encode(next), cm.power));
    ASSERT_TRUE(same_state(step_lrtm(cm.machine, sp), want)) << "t " << t;
    s = next;
  }
}

TEST(CaToTuring, Rule184BetaIsStationary) {
  const MarkovShift L(A2, {{0, 0}}), R(A2, {{1, 1}});
  const CAMachine cm = ca_to_turing(LocalRule::wolfram(184), L, R, 1);
  EXPECT_EQ(check_restrictions(cm.machine), "");
  Configuration pc = to_power(Configuration::periodic({0}, {0, 0, 1, 1}, {1}, 0), cm.power);
  MachineState ms = cm.psi(pc);
  const std::int64_t z0 = ms.z;
  for (int t = 0; t < 30; ++t) {
    ms = step_lrtm(cm.machine, ms);
    pc = apply(cm.power_rule, pc);
    ASSERT_TRUE(same_state(ms, cm.psi(pc)));
  }
  EXPECT_EQ(ms.z, z0);
}

TEST(CaToTuring, RejectsMovingBackgrounds) {
  const MarkovShift g = MarkovShift::from_cycles(A2, {A2.parse("01")});
  EXPECT_THROW(ca_to_turing(LocalRule::wolfram(184), g, g, 1), Error);
}

TEST(Classical, StepAndWindow) {
  const ClassicalTM tm = increment_tm();
  tm.validate();
  ClassicalConfig c;
  c.cells = {1, 0, 1, 1};
  c.origin = -3;
  for (int i = 0; i < 10; ++i) c = step_classical(tm, c);
  EXPECT_EQ(c.window(-3, 1), (Word{1, 1, 0, 0}));
  EXPECT_EQ(c.state, 2u);
  EXPECT_EQ(c.head, -2);
}

TEST(Classical, ValidateRejectsBadTables) {
  ClassicalTM tm = increment_tm();
  tm.move[0] = 2;
  EXPECT_THROW(tm.validate(), InvalidMachine);
}

TEST(CycleEncoder, GoldenMeanBlocks) {
  const MarkovShift g(A2, {{0, 0}, {0, 1}, {1, 0}});
  const CycleEncoder e(g);
  EXPECT_EQ(e.block(0).size(), e.block(1).size());
  const Word bits{1, 0, 0, 1, 1};
  const Word code = e.encode(bits);
  EXPECT_TRUE(is_cyclically_admissible(g, code));
  EXPECT_EQ(e.decode(code), bits);
  const CycleEncoder s = e.stretched(2 * e.block_length());
  EXPECT_EQ(s.decode(s.encode(bits)), bits);
  EXPECT_FALSE(e.decode_block(Word(static_cast<std::size_t>(e.block_length()), 1)).has_value());
}

TEST(Embedding, IncrementOverGoldenMeanBackgrounds) {
  const ClassicalTM tm = increment_tm();
  const MarkovShift g(A2, {{0, 0}, {0, 1}, {1, 0}});
  const ClassicalEmbedding emb = classical_to_lr(tm, g, MarkovShift::full(A2));
  EXPECT_EQ(check_restrictions(emb.machine), "");
  ClassicalConfig c;
  c.cells = {0, 1, 1, 1};
  c.origin = -3;
  MachineState s = emb.encode(c);
  for (int i = 0; i < 12; ++i) {
    c = step_classical(tm, c);
    s = emb.macro_step(s);
    const ClassicalConfig d = emb.decode(s, 6);
    ASSERT_EQ(d.window(c.head - 6, c.head + 7), c.window(c.head - 6, c.head + 7));
    ASSERT_EQ(d.state, c.state);
  }
  EXPECT_EQ(c.window(-3, 1), (Word{1, 0, 0, 0}));
}

TEST(Regime, Trichotomy) {
  const MarkovShift full = MarkovShift::full(A2);
  const MarkovShift fixed(A2, {{0, 0}});
  EXPECT_EQ(regime_of(full, full), Regime::TuringComplete);
  EXPECT_EQ(regime_of(fixed, full), Regime::APDA);
  EXPECT_EQ(regime_of(full, fixed), Regime::APDA);
  EXPECT_EQ(regime_of(fixed, fixed), Regime::Ballistic);
  EXPECT_EQ(to_string(Regime::APDA), "APDA");
}

TEST(APDA, MachineFormTracksStack) {
  // One state; push 1 on 0, pop on 1.
  APDA a;
  a.states = 1;
  a.stack_symbols = 2;
  a.next = {0, 0};
  a.op = {{StackOp::Kind::Push, 1}, {StackOp::Kind::Pop, 0}};
  APDAState st{0, HalfTape(Word{0, 1, 1}, {0})};
  st = step_apda(a, st);
  EXPECT_EQ(st.stack.read(4), (Word{1, 0, 1, 1}));
  st = step_apda(a, st);
  EXPECT_EQ(st.stack.read(3), (Word{0, 1, 1}));
  EXPECT_FALSE(detect_runaway_cycle(a).has_value());

  const LRTuringMachine m = apda_as_machine(a);
  EXPECT_EQ(check_restrictions(m), "");
}

TEST(APDA, RunawayCycleFound) {
  APDA a;
  a.states = 2;
  a.stack_symbols = 2;
  // (0,0) -> (1,1) -> (1,1) keeps pushing 1 in state 1.
  a.next = {1, 0, 1, 1};
  a.op = {{StackOp::Kind::Push, 1}, {StackOp::Kind::Push, 0}, {StackOp::Kind::Pop, 0}, {StackOp::Kind::Push, 1}};
  const auto c = detect_runaway_cycle(a);
  ASSERT_TRUE(c.has_value());
  ASSERT_EQ(c->states.size(), 1u);
  EXPECT_EQ(c->states[0], (std::pair<HeadState, Symbol>{1, 1}));
  a.op[3] = {StackOp::Kind::Pop, 0};
  EXPECT_FALSE(detect_runaway_cycle(a).has_value());
}
