#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "defectkin/ca.hpp"
#include "defectkin/configuration.hpp"
#include "defectkin/subshift.hpp"

namespace defectkin {

using HeadState = std::size_t;

// Half-infinite tape: near[0] is the cell next to the head, then the
// periodic tail repeats outward.
class HalfTape {
 public:
  HalfTape() = default;
  HalfTape(Word near, Word tail);

  Symbol at(std::size_t i) const;
  void set(std::size_t i, Symbol s);
  void push_front(Symbol s);
  Symbol pop_front();
  const std::deque<Symbol>& near() const { return near_; }
  const Word& tail() const { return tail_; }
  // First n cells.
  Word read(std::size_t n) const;

 private:
  void materialize(std::size_t n);

  std::deque<Symbol> near_;
  Word tail_;
  std::size_t tail_phase_ = 0;  // tail index of the first cell past near
};

// Equal as infinite sequences.
bool same_tape(const HalfTape& a, const HalfTape& b);

struct MachineState {
  HalfTape left;  // left.at(0) = l1, left.at(1) = l2, ...
  HeadState head = 0;
  HalfTape right;  // right.at(0) = r1, ...
  std::int64_t z = 0;  // head at z + 1/2
};

bool same_state(const MachineState& a, const MachineState& b);

// (L,R)-Turing machine. Writes: tau_L gives l1', tau_R gives r1',
// tau_C the cell created next to the head when it moves.
struct LRTuringMachine {
  Alphabet alphabet;
  std::size_t heads = 0;
  std::vector<std::string> head_labels;  // optional
  std::function<Symbol(Symbol l2, Symbol l1, HeadState d)> tau_L;
  std::function<Symbol(Symbol l1, HeadState d, Symbol r1)> tau_C;
  std::function<Symbol(HeadState d, Symbol r1, Symbol r2)> tau_R;
  std::function<HeadState(Symbol l2, Symbol l1, HeadState d, Symbol r1, Symbol r2)> upsilon;
  std::function<int(Symbol l1, HeadState d, Symbol r1)> velocity;
  MarkovShift L;
  MarkovShift R;
};

// Theta. Throws InvalidMachine if a write breaks admissibility.
MachineState step_lrtm(const LRTuringMachine& m, MachineState s);

// Exhaustive check of the update's dependency restrictions over
// A^4 x D (throws if that domain exceeds max_domain). Empty when fine,
// else a description of the first violation.
std::string check_restrictions(const LRTuringMachine& m, std::size_t max_domain = 1u << 22);

// ------------------------------------------------------------ CA -> machine

// Machine of a CA whose backgrounds are pointwise fixed, on the W-th
// power alphabet with D = A^W x A^W.
struct CAMachine {
  LRTuringMachine machine;
  BlockCoder power;    // letters -> A^W
  LocalRule power_rule;
  MarkovShift L_hat, R_hat;

  // Psi: tracked configuration (power alphabet, periodic backgrounds)
  // to machine state. Throws if there is not exactly one defect.
  MachineState psi(const Configuration& power_config) const;
  // Head state of a padded defect word (d0, d1).
  HeadState head_of(Symbol d0, Symbol d1) const;
};

CAMachine ca_to_turing(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W);

// Letters to W-blocks. The periodic backgrounds must have periods and
// core placement compatible with the block grid (block 0 starts at
// cell 0); backgrounds are unrolled as needed.
Configuration to_power(const Configuration& letters, const BlockCoder& power);

// ------------------------------------------------------------ machine -> CA

// Radius-2 CA whose alphabet is the tape letters followed by one marked
// copy (letter, head) per pair: the cell left of the head carries the
// head state. One CA step per machine step.
class CompiledCA {
 public:
  explicit CompiledCA(LRTuringMachine machine);

  const Alphabet& alphabet() const { return alphabet_; }
  int radius() const { return 2; }
  Symbol local(const Symbol* nb) const;  // 5 cells
  Configuration step(const Configuration& c) const;
  // Full lookup table; throws if it would exceed max_entries.
  LocalRule to_local_rule(std::size_t max_entries = 1u << 24) const;

  Configuration encode(const MachineState& s) const;
  MachineState decode(const Configuration& c) const;

  Symbol marked(Symbol letter, HeadState d) const;
  bool is_marked(Symbol s) const { return s >= n_; }
  const LRTuringMachine& machine() const { return machine_; }
  // L and R lifted to the CA alphabet.
  MarkovShift lifted(const MarkovShift& s) const;

 private:
  LRTuringMachine machine_;
  Symbol n_;
  Alphabet alphabet_;
};

CompiledCA turing_to_ca(const LRTuringMachine& machine);

// ------------------------------------------------------------ classical

struct ClassicalTM {
  std::size_t tape_symbols = 2;
  std::size_t states = 1;
  std::vector<std::string> state_labels;
  // Indexed [t * states + d].
  std::vector<Symbol> write;
  std::vector<HeadState> next;
  std::vector<int> move;
  std::optional<HeadState> halt;  // self-loop with move 0

  Symbol tau(Symbol t, HeadState d) const { return write[t * states + d]; }
  HeadState upsilon(Symbol t, HeadState d) const { return next[t * states + d]; }
  int velocity(Symbol t, HeadState d) const { return move[t * states + d]; }
  void validate() const;
};

// Cells [origin, origin + cells.size()) explicit, blank elsewhere.
struct ClassicalConfig {
  Word cells;
  std::int64_t origin = 0;
  std::int64_t head = 0;
  HeadState state = 0;
  Symbol blank = 0;

  Symbol at(std::int64_t i) const;
  void set(std::int64_t i, Symbol s);
  // Cells [lo, hi).
  Word window(std::int64_t lo, std::int64_t hi) const;
};

ClassicalConfig step_classical(const ClassicalTM& tm, ClassicalConfig c);

class CycleEncoder {
 public:
  // Two distinct equal-length cycles from a common vertex.
  explicit CycleEncoder(const MarkovShift& shift);
  CycleEncoder(Word c0, Word c1);

  int block_length() const { return static_cast<int>(c0_.size()); }
  const Word& block(Symbol bit) const { return bit ? c1_ : c0_; }
  Word encode(const Word& bits) const;
  // Throws if the word is not a concatenation of blocks.
  Word decode(const Word& word) const;
  std::optional<Symbol> decode_block(const Word& block) const;
  // Both blocks repeated to length P (a multiple of the block length).
  CycleEncoder stretched(int P) const;

 private:
  Word c0_, c1_;
};

struct ClassicalEmbedding {
  LRTuringMachine machine;
  CycleEncoder left;
  CycleEncoder right;
  int P = 1;
  ClassicalTM tm;

  MachineState encode(const ClassicalConfig& c) const;
  // The head must be idle (between macro-steps). Cells within `radius`
  // of the head are decoded.
  ClassicalConfig decode(const MachineState& s, std::int64_t radius) const;
  bool idle(HeadState h) const;
  // Micro-steps until the next idle head.
  MachineState macro_step(MachineState s) const;

  // Head state layout.
  struct Head {
    int dir = 0;  // 0 idle, +1 moving right, -1 moving left
    int k = 0;    // micro-steps taken
    HeadState d = 0;
    Symbol t = 0;  // t0 when idle, the written symbol while moving
    Word buffer;
  };
  std::vector<Head> heads;
  std::map<std::tuple<int, int, HeadState, Symbol, Word>, HeadState> index;
  HeadState head_index(const Head& h) const;
};

ClassicalEmbedding classical_to_lr(const ClassicalTM& tm, const MarkovShift& L, const MarkovShift& R);

// ------------------------------------------------------------ regimes

enum class Regime { Ballistic, APDA, TuringComplete };
std::string to_string(Regime r);
Regime regime_of(const MarkovShift& L, const MarkovShift& R);

// ------------------------------------------------------------ APDA

struct StackOp {
  enum class Kind { Pop, Noop, Push } kind = Kind::Noop;
  Symbol symbol = 0;
};

// Stack alphabet = tape alphabet; symbol 0 is the null letter of the
// constant left background.
struct APDA {
  std::size_t stack_symbols = 2;
  std::size_t states = 1;
  std::vector<HeadState> next;  // [t * states + d]
  std::vector<StackOp> op;

  HeadState upsilon(Symbol t, HeadState d) const { return next[t * states + d]; }
  const StackOp& sigma(Symbol t, HeadState d) const { return op[t * states + d]; }
};

struct APDAState {
  HeadState d = 0;
  HalfTape stack;  // stack.at(0) is the top
};

APDAState step_apda(const APDA& a, APDAState s);

// (L,R)-machine with L = {0-bar}, R full. A push takes two steps: the
// head first records (next state, pushed symbol), then moves left.
LRTuringMachine apda_as_machine(const APDA& a);

struct RunawayCycle {
  std::vector<std::pair<HeadState, Symbol>> states;  // (d, top)
};

// First cycle of (d, r) -> (Upsilon(r, d), pushed symbol) through
// pushes only, in (d, r) order.
std::optional<RunawayCycle> detect_runaway_cycle(const APDA& a);
std::vector<RunawayCycle> runaway_cycles(const APDA& a);

}  // namespace defectkin
