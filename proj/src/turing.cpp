#include "defectkin/turing.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "defectkin/defect.hpp"
#include "defectkin/diffusive.hpp"
#include "defectkin/errors.hpp"

namespace defectkin {

// ---------------------------------------------------------------- tapes

HalfTape::HalfTape(Word near, Word tail) : near_(near.begin(), near.end()), tail_(std::move(tail)) {
  if (tail_.empty()) throw Error("tape tail must be nonempty");
}

void HalfTape::materialize(std::size_t n) {
  while (near_.size() < n) {
    near_.push_back(tail_[tail_phase_]);
    tail_phase_ = (tail_phase_ + 1) % tail_.size();
  }
}

Symbol HalfTape::at(std::size_t i) const {
  if (i < near_.size()) return near_[i];
  return tail_[(tail_phase_ + i - near_.size()) % tail_.size()];
}

void HalfTape::set(std::size_t i, Symbol s) {
  materialize(i + 1);
  near_[i] = s;
}

void HalfTape::push_front(Symbol s) { near_.push_front(s); }

Symbol HalfTape::pop_front() {
  materialize(1);
  const Symbol s = near_.front();
  near_.pop_front();
  return s;
}

Word HalfTape::read(std::size_t n) const {
  Word w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
  return w;
}

bool same_tape(const HalfTape& a, const HalfTape& b) {
  const std::size_t depth = std::max(a.near().size(), b.near().size()) + a.tail().size() * b.tail().size();
  for (std::size_t i = 0; i < depth; ++i)
    if (a.at(i) != b.at(i)) return false;
  return true;
}

bool same_state(const MachineState& a, const MachineState& b) {
  return a.head == b.head && a.z == b.z && same_tape(a.left, b.left) && same_tape(a.right, b.right);
}

// ---------------------------------------------------------------- machine

MachineState step_lrtm(const LRTuringMachine& m, MachineState s) {
  const Symbol l1 = s.left.at(0), l2 = s.left.at(1);
  const Symbol r1 = s.right.at(0), r2 = s.right.at(1);
  const HeadState d = s.head;
  const int v = m.velocity(l1, d, r1);
  const HeadState next = m.upsilon(l2, l1, d, r1, r2);
  if (next >= m.heads) throw InvalidMachine("head update outside the head domain");
  const Alphabet& A = m.alphabet;
  auto need = [&](const MarkovShift& S, Symbol a, Symbol b, const char* side) {
    if (!S.has_edge(a, b)) {
      std::ostringstream os;
      os << "invalid machine: writes " << A.format({a, b}) << " on the " << side << " tape (head "
         << d << ", context " << A.format({l2, l1}) << "|" << A.format({r1, r2}) << ")";
      throw InvalidMachine(os.str());
    }
  };
  switch (v) {
    case -1: {
      const Symbol r0n = m.tau_C(l1, d, r1);
      const Symbol r1n = m.tau_R(d, r1, r2);
      need(m.R, r1n, r2, "right");
      need(m.R, r0n, r1n, "right");
      s.left.pop_front();
      s.right.set(0, r1n);
      s.right.push_front(r0n);
      break;
    }
    case 0: {
      const Symbol l1n = m.tau_L(l2, l1, d);
      const Symbol r1n = m.tau_R(d, r1, r2);
      need(m.L, l2, l1n, "left");
      need(m.R, r1n, r2, "right");
      s.left.set(0, l1n);
      s.right.set(0, r1n);
      break;
    }
    case 1: {
      const Symbol l1n = m.tau_L(l2, l1, d);
      const Symbol l0n = m.tau_C(l1, d, r1);
      need(m.L, l2, l1n, "left");
      need(m.L, l1n, l0n, "left");
      s.right.pop_front();
      s.left.set(0, l1n);
      s.left.push_front(l0n);
      break;
    }
    default:
      throw InvalidMachine("velocity outside {-1, 0, 1}");
  }
  s.head = next;
  s.z += v;
  return s;
}

std::string check_restrictions(const LRTuringMachine& m, std::size_t max_domain) {
  const auto n = static_cast<Symbol>(m.alphabet.size());
  const std::size_t domain = static_cast<std::size_t>(n) * n * n * n * m.heads;
  if (domain > max_domain) throw Error("machine too large for an exhaustive restriction check");
  std::map<std::tuple<int, Symbol, HeadState, Symbol>, HeadState> seen;
  for (Symbol l2 = 0; l2 < n; ++l2)
    for (Symbol l1 : m.L.followers(l2))
      for (HeadState d = 0; d < m.heads; ++d)
        for (Symbol r1 = 0; r1 < n; ++r1)
          for (Symbol r2 : m.R.followers(r1)) {
            const int v = m.velocity(l1, d, r1);
            const HeadState next = m.upsilon(l2, l1, d, r1, r2);
            std::tuple<int, Symbol, HeadState, Symbol> key;
            if (v == -1)
              key = {v, l2 * n + l1, d, 0};
            else if (v == 0)
              key = {v, l1, d, r1};
            else
              key = {v, 0, d, r1 * n + r2};
            auto [it, fresh] = seen.emplace(key, next);
            if (!fresh && it->second != next) {
              std::ostringstream os;
              os << "update depends on a cell it may not read (velocity " << v << ", head " << d << ", context "
                 << m.alphabet.format({l2, l1}) << "|" << m.alphabet.format({r1, r2}) << ")";
              return os.str();
            }
          }
  return {};
}

// ---------------------------------------------------------------- CA -> machine

namespace {

struct Raw {
  std::int64_t z, L, R;
};

std::optional<Raw> locate_raw(const MarkovShift& U, const Word& u) {
  std::int64_t first = -1, last = -1;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    if (U.has_edge(u[j], u[j + 1])) continue;
    const auto J = static_cast<std::int64_t>(j);
    if (first >= 0 && last != J - 1) throw MultipleDefects();
    if (first < 0) first = J;
    last = J;
  }
  if (first < 0) return std::nullopt;
  const std::int64_t w = last - first;
  Raw r{0, (w + 1) / 2 - 1, w / 2};
  r.z = first + r.L + 1;
  return r;
}

// First admissible (2r+1)-word not mapped to its centre.
std::optional<Word> not_fixed(const LocalRule& rule, const MarkovShift& S) {
  const std::size_t len = static_cast<std::size_t>(rule.width());
  std::optional<Word> bad;
  Word w;
  auto dfs = [&](auto&& self) -> void {
    if (bad) return;
    if (w.size() == len) {
      if (rule(w) != w[len / 2]) bad = w;
      return;
    }
    const auto& next = w.empty() ? S.vertices() : S.followers(w.back());
    for (Symbol s : next) {
      w.push_back(s);
      self(self);
      w.pop_back();
    }
  };
  dfs(dfs);
  return bad;
}

// Edges (u, v) between W-blocks whose concatenation is S-admissible.
MarkovShift power_shift(const MarkovShift& S, const BlockCoder& coder) {
  const std::size_t N = coder.target().size();
  auto path = [&](const Word& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!S.has_edge(w[i], w[i + 1])) return false;
    return true;
  };
  std::vector<Edge> edges;
  for (Symbol u = 0; u < N; ++u)
    for (Symbol v = 0; v < N; ++v) {
      Word w = coder.block(u);
      const Word& b = coder.block(v);
      w.insert(w.end(), b.begin(), b.end());
      if (path(w)) edges.emplace_back(u, v);
    }
  return MarkovShift(coder.target(), edges);
}

}  // namespace

HeadState CAMachine::head_of(Symbol d0, Symbol d1) const {
  return static_cast<HeadState>(d0) * power.target().size() + d1;
}

MachineState CAMachine::psi(const Configuration& c) const {
  if (c.sampled(Side::Left) || c.sampled(Side::Right)) throw Error("psi needs periodic backgrounds");
  auto iv = locate_defect(c, WindowLanguage::markov(union_shift(L_hat, R_hat)));
  if (!iv) throw Error("no defect in the configuration");
  const DefectRecord rec = record_from_interval(c, *iv, 0);
  if (rec.L > 0 || rec.R > 1) throw NotAFunction("defect wider than two cells; increase W");
  const std::int64_t z = rec.z;
  MachineState s;
  s.z = z;
  s.head = head_of(c.at(z), c.at(z + 1));
  const std::int64_t b = std::min(c.origin(), z);
  const auto pl = static_cast<std::int64_t>(std::get<PeriodicBackground>(c.left()).word.size());
  Word near, tail;
  for (std::int64_t x = z - 1; x >= b; --x) near.push_back(c.at(x));
  for (std::int64_t x = b - 1; x >= b - pl; --x) tail.push_back(c.at(x));
  s.left = HalfTape(near, tail);
  const std::int64_t e = std::max(c.end(), z + 2);
  const auto pr = static_cast<std::int64_t>(std::get<PeriodicBackground>(c.right()).word.size());
  near.clear();
  tail.clear();
  for (std::int64_t x = z + 2; x < e; ++x) near.push_back(c.at(x));
  for (std::int64_t x = e; x < e + pr; ++x) tail.push_back(c.at(x));
  s.right = HalfTape(near, tail);
  return s;
}

CAMachine ca_to_turing(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W) {
  if (W < 1) throw Error("W must be positive");
  if (W < rule.radius()) throw Error("W must be at least the rule radius");
  if (auto w = not_fixed(rule, L)) throw Error("regime mismatch: L is not fixed by the rule at " + rule.alphabet().format(*w));
  if (auto w = not_fixed(rule, R)) throw Error("regime mismatch: R is not fixed by the rule at " + rule.alphabet().format(*w));
  const Alphabet& A = rule.alphabet();
  std::vector<Word> blocks;
  std::size_t count = 1;
  for (int i = 0; i < W; ++i) count *= A.size();
  for (std::size_t c = 0; c < count; ++c) {
    Word b(static_cast<std::size_t>(W));
    std::size_t v = c;
    for (int i = W - 1; i >= 0; --i) {
      b[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % A.size());
      v /= A.size();
    }
    blocks.push_back(std::move(b));
  }
  BlockCoder coder(CoderKind::Power, A, std::move(blocks));
  LocalRule prule = recode_rule(rule, coder);
  MarkovShift Lh = power_shift(L, coder), Rh = power_shift(R, coder);
  const MarkovShift U = union_shift(Lh, Rh);
  const auto N = static_cast<Symbol>(coder.target().size());

  struct Step {
    int v;
    HeadState next;
  };
  auto phi = [prule](Symbol a, Symbol b, Symbol c) { return prule.at3(a, b, c); };
  auto eval = [phi, U, N](Symbol l2, Symbol l1, HeadState d, Symbol r1, Symbol r2) -> Step {
    const auto d0 = static_cast<Symbol>(d / N), d1 = static_cast<Symbol>(d % N);
    const Word img{l2, phi(l2, l1, d0), phi(l1, d0, d1), phi(d0, d1, r1), phi(d1, r1, r2), r2};
    auto loc = locate_raw(U, img);
    if (!loc) return {0, static_cast<HeadState>(img[2]) * N + img[3]};
    if (loc->L > 0 || loc->R > 1) throw NotAFunction("defect wider than two cells; increase W");
    const int v = static_cast<int>(loc->z - 2);
    if (v < -1 || v > 1) throw NotAFunction("defect moved more than one cell; increase W");
    const auto z = static_cast<std::size_t>(loc->z);
    return {v, static_cast<HeadState>(img[z]) * N + img[z + 1]};
  };
  auto velocity = [eval, Lh, Rh](Symbol l1, HeadState d, Symbol r1) {
    std::optional<int> v;
    for (Symbol l2 : Lh.predecessors(l1))
      for (Symbol r2 : Rh.followers(r1)) {
        const int w = eval(l2, l1, d, r1, r2).v;
        if (v && *v != w) throw NotAFunction("velocity depends on cells beyond the head's neighbours");
        v = w;
      }
    return v.value_or(0);
  };

  LRTuringMachine m{coder.target(), static_cast<std::size_t>(N) * N, {}, {}, {}, {}, {}, {}, Lh, Rh};
  m.tau_L = [phi, N](Symbol l2, Symbol l1, HeadState d) { return phi(l2, l1, static_cast<Symbol>(d / N)); };
  m.tau_C = [phi, N, velocity](Symbol l1, HeadState d, Symbol r1) {
    const auto d0 = static_cast<Symbol>(d / N), d1 = static_cast<Symbol>(d % N);
    return velocity(l1, d, r1) == 1 ? phi(l1, d0, d1) : phi(d0, d1, r1);
  };
  m.tau_R = [phi, N](HeadState d, Symbol r1, Symbol r2) { return phi(static_cast<Symbol>(d % N), r1, r2); };
  m.upsilon = [eval](Symbol l2, Symbol l1, HeadState d, Symbol r1, Symbol r2) {
    return eval(l2, l1, d, r1, r2).next;
  };
  m.velocity = velocity;
  return CAMachine{std::move(m), std::move(coder), std::move(prule), std::move(Lh), std::move(Rh)};
}

Configuration to_power(const Configuration& c, const BlockCoder& power) {
  if (c.sampled(Side::Left) || c.sampled(Side::Right)) throw Error("to_power needs periodic backgrounds");
  const std::int64_t W = power.length();
  const auto& lw = std::get<PeriodicBackground>(c.left()).word;
  const auto& rw = std::get<PeriodicBackground>(c.right()).word;
  const std::int64_t kl = std::lcm(static_cast<std::int64_t>(lw.size()), W) / W;
  const std::int64_t kr = std::lcm(static_cast<std::int64_t>(rw.size()), W) / W;
  const std::int64_t B0 = floor_div(c.origin(), W) - 1;
  const std::int64_t B1 = floor_div(c.end() + W - 1, W) + 1;
  auto blocks = [&](std::int64_t lo, std::int64_t hi) {
    Word out;
    for (std::int64_t b = lo; b < hi; ++b) {
      auto s = power.symbol_of(c.window(b * W, (b + 1) * W));
      if (!s) throw Error("block outside the power alphabet");
      out.push_back(*s);
    }
    return out;
  };
  return Configuration(PeriodicBackground{blocks(B0 - kl, B0), B0 - kl}, blocks(B0, B1), B0,
                       PeriodicBackground{blocks(B1, B1 + kr), B1});
}

// ---------------------------------------------------------------- machine -> CA

namespace {

Alphabet marked_alphabet(const LRTuringMachine& m) {
  std::vector<std::string> labels = m.alphabet.labels();
  for (Symbol a = 0; a < m.alphabet.size(); ++a)
    for (HeadState d = 0; d < m.heads; ++d) {
      const std::string head = d < m.head_labels.size() ? m.head_labels[d] : std::to_string(d);
      labels.push_back(m.alphabet.label(a) + "@" + head);
    }
  return Alphabet(std::move(labels));
}

}  // namespace

CompiledCA::CompiledCA(LRTuringMachine machine)
    : machine_(std::move(machine)),
      n_(static_cast<Symbol>(machine_.alphabet.size())),
      alphabet_(marked_alphabet(machine_)) {}

Symbol CompiledCA::marked(Symbol letter, HeadState d) const {
  return n_ + static_cast<Symbol>(letter * machine_.heads + d);
}

Symbol CompiledCA::local(const Symbol* nb) const {
  int j = -1;
  for (int i = 0; i < 5; ++i)
    if (is_marked(nb[i])) {
      if (j >= 0) return nb[2];  // two heads: not a reachable neighbourhood
      j = i;
    }
  if (j < 0 || j == 0 || j == 4) return nb[2];
  const auto letter = [&](int i) { return is_marked(nb[i]) ? (nb[i] - n_) / static_cast<Symbol>(machine_.heads) : nb[i]; };
  const HeadState d = (nb[j] - n_) % machine_.heads;
  const Symbol l1 = letter(j);
  const Symbol l2 = letter(j - 1);
  const Symbol r1 = letter(j + 1);
  const LRTuringMachine& m = machine_;
  const int v = m.velocity(l1, d, r1);
  if (j == 2) {  // this cell holds the head
    const Symbol r2 = letter(4);
    if (v == 0) return marked(m.tau_L(l2, l1, d), m.upsilon(l2, l1, d, r1, r2));
    if (v == 1) return m.tau_L(l2, l1, d);
    return m.tau_C(l1, d, r1);
  }
  if (j == 1) {  // right neighbour of the head
    const Symbol r2 = letter(3);
    if (v == 1) return marked(m.tau_C(l1, d, r1), m.upsilon(l2, l1, d, r1, r2));
    return m.tau_R(d, r1, r2);
  }
  // j == 3: left neighbour; the update ignores r2 when moving left.
  if (v == -1) return marked(l2, m.upsilon(l2, l1, d, r1, r1));
  return nb[2];
}

Configuration CompiledCA::step(const Configuration& c) const {
  if (c.sampled(Side::Left) || c.sampled(Side::Right)) throw Error("compiled CA needs periodic backgrounds");
  const std::int64_t lo = c.origin() - 2, hi = c.end() + 2;
  const Word w = c.window(lo - 2, hi + 2);
  Word core(static_cast<std::size_t>(hi - lo));
  std::int64_t head = 0;
  for (std::size_t i = 0; i < core.size(); ++i) {
    core[i] = local(w.data() + i);
    if (is_marked(core[i])) head = lo + static_cast<std::int64_t>(i);
  }
  Configuration out = c;
  out.set_core(std::move(core), lo);
  out.trim(head - 3, head + 4);
  return out;
}

LocalRule CompiledCA::to_local_rule(std::size_t max_entries) const {
  std::size_t entries = 1;
  for (int i = 0; i < 5; ++i) {
    entries *= alphabet_.size();
    if (entries > max_entries) throw Error("compiled CA table too large");
  }
  return LocalRule::from_function(alphabet_, 2, [this](const Word& nb) { return local(nb.data()); });
}

MarkovShift CompiledCA::lifted(const MarkovShift& s) const { return MarkovShift(alphabet_, s.edges()); }

Configuration CompiledCA::encode(const MachineState& s) const {
  const std::int64_t z = s.z;
  const auto nl = static_cast<std::int64_t>(s.left.near().size() + s.left.tail().size());
  const auto pl = static_cast<std::int64_t>(s.left.tail().size());
  const auto nr = static_cast<std::int64_t>(s.right.near().size() + s.right.tail().size());
  const auto pr = static_cast<std::int64_t>(s.right.tail().size());
  auto left_cell = [&](std::int64_t x) { return s.left.at(static_cast<std::size_t>(z - x)); };
  Word core;
  for (std::int64_t x = z - nl + 1; x <= z; ++x) core.push_back(left_cell(x));
  core.back() = marked(core.back(), s.head);
  for (std::int64_t k = 0; k < nr; ++k) core.push_back(s.right.at(static_cast<std::size_t>(k)));
  const std::int64_t a = z - nl + 1 - pl;
  Word lw, rw;
  for (std::int64_t i = 0; i < pl; ++i) lw.push_back(left_cell(a + i));
  for (std::int64_t i = 0; i < pr; ++i) rw.push_back(s.right.at(static_cast<std::size_t>(nr + i)));
  return Configuration(PeriodicBackground{lw, a}, std::move(core), z - nl + 1,
                       PeriodicBackground{rw, z + 1 + nr});
}

MachineState CompiledCA::decode(const Configuration& c) const {
  if (c.sampled(Side::Left) || c.sampled(Side::Right)) throw Error("compiled CA needs periodic backgrounds");
  std::optional<std::int64_t> z;
  for (std::int64_t x = c.origin(); x < c.end(); ++x)
    if (is_marked(c.at(x))) {
      if (z) throw Error("configuration carries more than one head");
      z = x;
    }
  if (!z) throw Error("configuration carries no head");
  const auto& lw = std::get<PeriodicBackground>(c.left()).word;
  const auto& rw = std::get<PeriodicBackground>(c.right()).word;
  for (Symbol s : lw)
    if (is_marked(s)) throw Error("head in the background");
  for (Symbol s : rw)
    if (is_marked(s)) throw Error("head in the background");
  MachineState s;
  s.z = *z;
  const Symbol h = c.at(*z);
  s.head = (h - n_) % machine_.heads;
  Word near, tail;
  near.push_back((h - n_) / static_cast<Symbol>(machine_.heads));
  for (std::int64_t x = *z - 1; x >= c.origin(); --x) near.push_back(c.at(x));
  for (std::int64_t x = c.origin() - 1; x >= c.origin() - static_cast<std::int64_t>(lw.size()); --x)
    tail.push_back(c.at(x));
  s.left = HalfTape(near, tail);
  near.clear();
  tail.clear();
  for (std::int64_t x = *z + 1; x < c.end(); ++x) near.push_back(c.at(x));
  for (std::int64_t x = c.end(); x < c.end() + static_cast<std::int64_t>(rw.size()); ++x) tail.push_back(c.at(x));
  s.right = HalfTape(near, tail);
  return s;
}

CompiledCA turing_to_ca(const LRTuringMachine& machine) { return CompiledCA(machine); }

// ---------------------------------------------------------------- classical

void ClassicalTM::validate() const {
  const std::size_t n = tape_symbols * states;
  if (tape_symbols == 0 || states == 0) throw InvalidMachine("empty machine");
  if (write.size() != n || next.size() != n || move.size() != n) throw InvalidMachine("transition table is not total");
  for (std::size_t i = 0; i < n; ++i) {
    if (write[i] >= tape_symbols) throw InvalidMachine("written symbol outside the tape alphabet");
    if (next[i] >= states) throw InvalidMachine("next state outside the state set");
    if (move[i] < -1 || move[i] > 1) throw InvalidMachine("move outside {-1, 0, 1}");
  }
  if (halt) {
    if (*halt >= states) throw InvalidMachine("halt state outside the state set");
    for (Symbol t = 0; t < tape_symbols; ++t)
      if (tau(t, *halt) != t || upsilon(t, *halt) != *halt || velocity(t, *halt) != 0)
        throw InvalidMachine("halt state must be a self-loop that writes nothing and stays");
  }
}

Symbol ClassicalConfig::at(std::int64_t i) const {
  if (i < origin || i >= origin + static_cast<std::int64_t>(cells.size())) return blank;
  return cells[static_cast<std::size_t>(i - origin)];
}

void ClassicalConfig::set(std::int64_t i, Symbol s) {
  if (cells.empty()) {
    cells.push_back(blank);
    origin = i;
  }
  while (i < origin) {
    cells.insert(cells.begin(), blank);
    --origin;
  }
  while (i >= origin + static_cast<std::int64_t>(cells.size())) cells.push_back(blank);
  cells[static_cast<std::size_t>(i - origin)] = s;
}

Word ClassicalConfig::window(std::int64_t lo, std::int64_t hi) const {
  Word w;
  for (std::int64_t i = lo; i < hi; ++i) w.push_back(at(i));
  return w;
}

ClassicalConfig step_classical(const ClassicalTM& tm, ClassicalConfig c) {
  const Symbol t = c.at(c.head);
  const HeadState d = c.state;
  c.set(c.head, tm.tau(t, d));
  c.state = tm.upsilon(t, d);
  c.head += tm.velocity(t, d);
  return c;
}

CycleEncoder::CycleEncoder(const MarkovShift& shift) {
  if (is_union_of_cycles(shift)) throw Error("entropy is zero: no cycle encoder exists");
  CyclePair cp = equal_length_cycles(shift);
  *this = CycleEncoder(cp.c0, cp.c1);
}

CycleEncoder::CycleEncoder(Word c0, Word c1) : c0_(std::move(c0)), c1_(std::move(c1)) {
  if (c0_.empty() || c0_.size() != c1_.size()) throw Error("encoder cycles must have equal nonzero length");
  if (c0_ == c1_) throw Error("encoder cycles must differ");
  if (c0_.front() != c1_.front()) throw Error("encoder cycles must start at the same vertex");
}

Word CycleEncoder::encode(const Word& bits) const {
  Word out;
  for (Symbol b : bits) {
    if (b > 1) throw Error("cycle encoder takes bits");
    const Word& blk = block(b);
    out.insert(out.end(), blk.begin(), blk.end());
  }
  return out;
}

std::optional<Symbol> CycleEncoder::decode_block(const Word& blk) const {
  if (blk == c0_) return 0;
  if (blk == c1_) return 1;
  return std::nullopt;
}

Word CycleEncoder::decode(const Word& word) const {
  const std::size_t P = c0_.size();
  if (word.size() % P != 0) throw Error("word length is not a multiple of the block length");
  Word bits;
  for (std::size_t i = 0; i < word.size(); i += P) {
    auto b = decode_block(Word(word.begin() + static_cast<std::ptrdiff_t>(i),
                               word.begin() + static_cast<std::ptrdiff_t>(i + P)));
    if (!b) throw Error("word is not in the image of the cycle encoder");
    bits.push_back(*b);
  }
  return bits;
}

CycleEncoder CycleEncoder::stretched(int P) const {
  const auto n = static_cast<int>(c0_.size());
  if (P % n != 0) throw Error("stretch must be a multiple of the block length");
  Word a, b;
  for (int i = 0; i < P / n; ++i) {
    a.insert(a.end(), c0_.begin(), c0_.end());
    b.insert(b.end(), c1_.begin(), c1_.end());
  }
  return CycleEncoder(a, b);
}

HeadState ClassicalEmbedding::head_index(const Head& h) const {
  auto it = index.find({h.dir, h.k, h.d, h.t, h.buffer});
  if (it == index.end()) throw Error("unknown head state");
  return it->second;
}

bool ClassicalEmbedding::idle(HeadState h) const { return heads.at(h).dir == 0; }

MachineState ClassicalEmbedding::encode(const ClassicalConfig& c) const {
  if (c.blank > 1) throw Error("classical tape must be binary");
  MachineState s;
  s.z = c.head * P;
  s.head = head_index(Head{0, 0, c.state, c.at(c.head), {}});
  const std::int64_t lo = std::min(c.origin, c.head), hi = std::max(c.origin + static_cast<std::int64_t>(c.cells.size()), c.head + 1);
  Word near;
  for (std::int64_t i = c.head - 1; i >= lo; --i) {
    const Word& b = left.block(c.at(i));
    near.insert(near.end(), b.rbegin(), b.rend());
  }
  Word tail(left.block(c.blank).rbegin(), left.block(c.blank).rend());
  s.left = HalfTape(near, tail);
  near.clear();
  for (std::int64_t i = c.head + 1; i < hi; ++i) {
    const Word& b = right.block(c.at(i));
    near.insert(near.end(), b.begin(), b.end());
  }
  s.right = HalfTape(near, right.block(c.blank));
  return s;
}

ClassicalConfig ClassicalEmbedding::decode(const MachineState& s, std::int64_t radius) const {
  const Head& h = heads.at(s.head);
  if (h.dir != 0) throw Error("head is between macro-steps");
  if (floor_mod(s.z, P) != 0) throw Error("head is off the block grid");
  ClassicalConfig c;
  c.head = floor_div(s.z, P);
  c.state = h.d;
  c.origin = c.head - radius;
  c.cells.assign(static_cast<std::size_t>(2 * radius + 1), 0);
  c.cells[static_cast<std::size_t>(radius)] = h.t;
  const auto uP = static_cast<std::size_t>(P);
  for (std::int64_t k = 1; k <= radius; ++k) {
    const auto off = static_cast<std::size_t>(k - 1) * uP;
    Word lb(uP), rb(uP);
    for (std::size_t i = 0; i < uP; ++i) {
      lb[uP - 1 - i] = s.left.at(off + i);
      rb[i] = s.right.at(off + i);
    }
    auto lt = left.decode_block(lb), rt = right.decode_block(rb);
    if (!lt || !rt) throw Error("tape is not in the image of the cycle encoders");
    c.cells[static_cast<std::size_t>(radius - k)] = *lt;
    c.cells[static_cast<std::size_t>(radius + k)] = *rt;
  }
  return c;
}

MachineState ClassicalEmbedding::macro_step(MachineState s) const {
  do {
    s = step_lrtm(machine, std::move(s));
  } while (!idle(s.head));
  return s;
}

ClassicalEmbedding classical_to_lr(const ClassicalTM& tm, const MarkovShift& L, const MarkovShift& R) {
  tm.validate();
  if (tm.tape_symbols > 2) throw Error("classical tape must be binary");
  if (!(L.alphabet() == R.alphabet())) throw Error("L and R use different alphabets");
  if (is_union_of_cycles(L) || is_union_of_cycles(R))
    throw Error("entropy of L or R is zero: use the APDA or finite automaton construction");
  CycleEncoder eL(L), eR(R);
  const int P = std::lcm(eL.block_length(), eR.block_length());
  ClassicalEmbedding out{LRTuringMachine{L.alphabet(), 0, {}, {}, {}, {}, {}, {}, L, R},
                         eL.stretched(P), eR.stretched(P), P, tm, {}, {}};
  ClassicalEmbedding* emb = &out;
  const auto n = static_cast<Symbol>(L.alphabet().size());

  auto add = [&](ClassicalEmbedding::Head h) {
    const auto id = static_cast<HeadState>(emb->heads.size());
    std::ostringstream os;
    const std::string dl = h.d < tm.state_labels.size() ? tm.state_labels[h.d] : std::to_string(h.d);
    if (h.dir == 0)
      os << dl << "/" << h.t;
    else
      os << dl << "/" << h.t << (h.dir > 0 ? ">" : "<") << h.k << ":" << L.alphabet().format(h.buffer);
    emb->machine.head_labels.push_back(os.str());
    emb->index.emplace(std::make_tuple(h.dir, h.k, h.d, h.t, h.buffer), id);
    emb->heads.push_back(std::move(h));
  };
  const auto T = static_cast<Symbol>(tm.tape_symbols);
  for (HeadState d = 0; d < tm.states; ++d)
    for (Symbol t = 0; t < T; ++t) add({0, 0, d, t, {}});
  for (int dir : {1, -1})
    for (int k = 1; k < P; ++k) {
      std::size_t count = 1;
      for (int i = 0; i < k; ++i) count *= n;
      for (HeadState d = 0; d < tm.states; ++d)
        for (Symbol t = 0; t < T; ++t)
          for (std::size_t c = 0; c < count; ++c) {
            Word buf(static_cast<std::size_t>(k));
            std::size_t v = c;
            for (int i = k - 1; i >= 0; --i) {
              buf[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % n);
              v /= n;
            }
            add({dir, k, d, t, std::move(buf)});
          }
    }
  emb->machine.heads = emb->heads.size();
  // The rules read a frozen copy of the layout.
  auto core = std::make_shared<const ClassicalEmbedding>(out);

  // Written symbol and direction of a head.
  auto plan = [core](HeadState h) {
    const auto& H = core->heads[h];
    if (H.dir != 0) return std::make_pair(H.dir, H.t);
    return std::make_pair(core->tm.velocity(H.t, H.d), core->tm.tau(H.t, H.d));
  };
  // Unreadable blocks count as 0: the embedding only runs on encoded tapes.
  auto finish = [core](int dir, HeadState d, Word buf) {
    Symbol t;
    if (dir > 0) {
      t = core->right.decode_block(buf).value_or(0);
    } else {
      std::reverse(buf.begin(), buf.end());
      t = core->left.decode_block(buf).value_or(0);
    }
    return core->head_index({0, 0, d, t, {}});
  };
  emb->machine.velocity = [plan](Symbol, HeadState h, Symbol) { return plan(h).first; };
  emb->machine.tau_L = [](Symbol, Symbol l1, HeadState) { return l1; };
  emb->machine.tau_R = [](HeadState, Symbol r1, Symbol) { return r1; };
  emb->machine.tau_C = [core, plan](Symbol, HeadState h, Symbol r1) {
    const auto [v, t] = plan(h);
    const int k = core->heads[h].k;
    if (v > 0) return core->left.block(t)[static_cast<std::size_t>(k)];
    if (v < 0) return core->right.block(t)[static_cast<std::size_t>(core->P - 1 - k)];
    return r1;
  };
  emb->machine.upsilon = [core, finish](Symbol, Symbol l1, HeadState h, Symbol r1, Symbol) {
    const auto& H = core->heads[h];
    int dir = H.dir, k = H.k;
    HeadState d = H.d;
    Symbol t = H.t;
    Word buf = H.buffer;
    if (dir == 0) {
      dir = core->tm.velocity(H.t, H.d);
      d = core->tm.upsilon(H.t, H.d);
      t = core->tm.tau(H.t, H.d);
      if (dir == 0) return core->head_index({0, 0, d, t, {}});
    }
    buf.push_back(dir > 0 ? r1 : l1);
    if (k + 1 == core->P) return finish(dir, d, std::move(buf));
    return core->head_index({dir, k + 1, d, t, std::move(buf)});
  };
  return out;
}

// ---------------------------------------------------------------- regimes

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Ballistic: return "Ballistic";
    case Regime::APDA: return "APDA";
    case Regime::TuringComplete: return "TuringComplete";
  }
  return "?";
}

Regime regime_of(const MarkovShift& L, const MarkovShift& R) {
  const bool l = !is_union_of_cycles(L), r = !is_union_of_cycles(R);
  if (l && r) return Regime::TuringComplete;
  if (l || r) return Regime::APDA;
  return Regime::Ballistic;
}

// ---------------------------------------------------------------- APDA

APDAState step_apda(const APDA& a, APDAState s) {
  const Symbol t = s.stack.at(0);
  const StackOp& op = a.sigma(t, s.d);
  s.d = a.upsilon(t, s.d);
  if (op.kind == StackOp::Kind::Pop)
    s.stack.pop_front();
  else if (op.kind == StackOp::Kind::Push)
    s.stack.push_front(op.symbol);
  return s;
}

LRTuringMachine apda_as_machine(const APDA& a) {
  const std::size_t D = a.states, T = a.stack_symbols;
  Alphabet A = Alphabet::numeric(T);
  std::vector<Edge> full;
  for (Symbol x = 0; x < T; ++x)
    for (Symbol y = 0; y < T; ++y) full.emplace_back(x, y);
  LRTuringMachine m{A, D + D * T, {}, {}, {}, {}, {}, {}, MarkovShift(A, {{0, 0}}), MarkovShift(A, full)};
  for (std::size_t h = 0; h < m.heads; ++h)
    m.head_labels.push_back(h < D ? std::to_string(h) : std::to_string((h - D) / T) + "+" + std::to_string((h - D) % T));
  auto pending = [D](HeadState h) { return h >= D; };
  m.velocity = [a, pending](Symbol, HeadState h, Symbol r1) {
    if (pending(h)) return -1;
    return a.sigma(r1, h).kind == StackOp::Kind::Pop ? 1 : 0;
  };
  m.tau_L = [](Symbol, Symbol, HeadState) -> Symbol { return 0; };
  m.tau_R = [](HeadState, Symbol r1, Symbol) { return r1; };
  m.tau_C = [D, T, pending](Symbol, HeadState h, Symbol) -> Symbol {
    return pending(h) ? static_cast<Symbol>((h - D) % T) : 0;
  };
  m.upsilon = [a, D, T, pending](Symbol, Symbol, HeadState h, Symbol r1, Symbol) -> HeadState {
    if (pending(h)) return (h - D) / T;
    const StackOp& op = a.sigma(r1, h);
    const HeadState next = a.upsilon(r1, h);
    if (op.kind == StackOp::Kind::Push) return D + next * T + op.symbol;
    return next;
  };
  return m;
}

std::vector<RunawayCycle> runaway_cycles(const APDA& a) {
  const std::size_t D = a.states, T = a.stack_symbols, n = D * T;
  auto id = [T](HeadState d, Symbol t) { return d * T + t; };
  std::vector<int> colour(n, 0);  // 0 new, 1 on path, 2 done
  std::vector<RunawayCycle> out;
  for (std::size_t s0 = 0; s0 < n; ++s0) {
    std::vector<std::size_t> path;
    std::size_t s = s0;
    while (true) {
      if (colour[s] == 2) break;
      if (colour[s] == 1) {
        RunawayCycle c;
        auto it = std::find(path.begin(), path.end(), s);
        std::vector<std::size_t> cyc(it, path.end());
        std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
        for (std::size_t x : cyc) c.states.emplace_back(x / T, static_cast<Symbol>(x % T));
        out.push_back(std::move(c));
        break;
      }
      const auto d = static_cast<HeadState>(s / T);
      const auto t = static_cast<Symbol>(s % T);
      const StackOp& op = a.sigma(t, d);
      if (op.kind != StackOp::Kind::Push) {
        colour[s] = 2;
        break;
      }
      colour[s] = 1;
      path.push_back(s);
      s = id(a.upsilon(t, d), op.symbol);
    }
    for (std::size_t x : path) colour[x] = 2;
  }
  std::sort(out.begin(), out.end(), [](const RunawayCycle& x, const RunawayCycle& y) { return x.states < y.states; });
  return out;
}

std::optional<RunawayCycle> detect_runaway_cycle(const APDA& a) {
  auto all = runaway_cycles(a);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace defectkin
