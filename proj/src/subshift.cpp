#include "defectkin/subshift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "defectkin/errors.hpp"

namespace defectkin {

// ---------------------------------------------------------------- MarkovShift

MarkovShift::MarkovShift(Alphabet alphabet, const std::vector<Edge>& edges)
    : alphabet_(std::move(alphabet)), n_(alphabet_.size()) {
  adj_.assign(n_ * n_, 0);
  for (auto [a, b] : edges) {
    if (a >= n_ || b >= n_) throw Error("edge endpoint outside alphabet");
    adj_[a * n_ + b] = 1;
  }
  usable_.assign(n_, 1);
  // Iteratively drop vertices with no in- or out-edge among usable ones.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < n_; ++v) {
      if (!usable_[v]) continue;
      bool has_in = false, has_out = false;
      for (std::size_t u = 0; u < n_ && !(has_in && has_out); ++u) {
        if (!usable_[u]) continue;
        has_out = has_out || adj_[v * n_ + u];
        has_in = has_in || adj_[u * n_ + v];
      }
      if (!has_in || !has_out) {
        usable_[v] = 0;
        changed = true;
      }
    }
  }
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b)
      if (!usable_[a] || !usable_[b]) adj_[a * n_ + b] = 0;
  out_.assign(n_, {});
  in_.assign(n_, {});
  for (std::size_t a = 0; a < n_; ++a) {
    if (usable_[a]) vertices_.push_back(static_cast<Symbol>(a));
    for (std::size_t b = 0; b < n_; ++b) {
      if (adj_[a * n_ + b]) {
        out_[a].push_back(static_cast<Symbol>(b));
        in_[b].push_back(static_cast<Symbol>(a));
        ++edge_count_;
      }
    }
  }
  if (vertices_.empty()) throw EmptySubshift();
}

MarkovShift MarkovShift::from_cycles(Alphabet alphabet, const std::vector<Word>& cycles) {
  std::vector<Edge> edges;
  for (const Word& c : cycles) {
    if (c.empty()) throw Error("empty cycle word");
    for (std::size_t i = 0; i < c.size(); ++i) edges.emplace_back(c[i], c[(i + 1) % c.size()]);
  }
  return MarkovShift(std::move(alphabet), edges);
}

MarkovShift MarkovShift::full(Alphabet alphabet) {
  std::vector<Edge> edges;
  for (Symbol a = 0; a < alphabet.size(); ++a)
    for (Symbol b = 0; b < alphabet.size(); ++b) edges.emplace_back(a, b);
  return MarkovShift(std::move(alphabet), edges);
}

std::vector<Edge> MarkovShift::edges() const {
  std::vector<Edge> e;
  for (Symbol a : vertices_)
    for (Symbol b : out_[a]) e.emplace_back(a, b);
  return e;
}

MarkovShift MarkovShift::restricted_to(const std::vector<Symbol>& keep) const {
  std::vector<unsigned char> in(n_, 0);
  for (Symbol s : keep) in.at(s) = 1;
  std::vector<Edge> e;
  for (auto [a, b] : edges())
    if (in[a] && in[b]) e.emplace_back(a, b);
  return MarkovShift(alphabet_, e);
}

bool is_admissible(const MarkovShift& shift, const Word& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!shift.has_edge(w[i], w[i + 1])) return false;
  return true;
}

bool is_cyclically_admissible(const MarkovShift& shift, const Word& w) {
  if (w.empty()) return true;
  return is_admissible(shift, w) && shift.has_edge(w.back(), w.front());
}

// ---------------------------------------------------------------- SFT

SFT::SFT(Alphabet alphabet, int q, std::set<Word> admissible)
    : alphabet_(std::move(alphabet)), q_(q), words_(std::move(admissible)) {
  if (q_ < 1) throw Error("SFT radius must be positive");
  for (const Word& w : words_) {
    if (static_cast<int>(w.size()) != q_) throw Error("SFT word of wrong length");
    for (Symbol s : w)
      if (s >= alphabet_.size()) throw Error("SFT word symbol outside alphabet");
  }
  if (q_ >= 2) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::set<Word> prefixes, suffixes;
      for (const Word& w : words_) {
        prefixes.insert(Word(w.begin(), w.end() - 1));
        suffixes.insert(Word(w.begin() + 1, w.end()));
      }
      for (auto it = words_.begin(); it != words_.end();) {
        Word head(it->begin(), it->end() - 1), tail(it->begin() + 1, it->end());
        if (!suffixes.count(head) || !prefixes.count(tail)) {
          it = words_.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
  }
  if (words_.empty()) throw EmptySubshift();
}

SFT SFT::from_periodic(Alphabet alphabet, const std::vector<Word>& words, int q) {
  std::set<Word> s;
  for (const Word& w : words) {
    if (w.empty()) throw Error("empty periodic word");
    for (std::size_t i = 0; i < w.size(); ++i) {
      Word win;
      for (int j = 0; j < q; ++j) win.push_back(w[(i + j) % w.size()]);
      s.insert(win);
    }
  }
  return SFT(std::move(alphabet), q, std::move(s));
}

// ---------------------------------------------------------------- BlockCoder

namespace {

Alphabet block_alphabet(const Alphabet& source, const std::vector<Word>& blocks) {
  std::vector<std::string> labels;
  for (const Word& b : blocks) labels.push_back(b.size() == 1 ? source.label(b[0]) : source.format(b));
  return Alphabet(std::move(labels));
}

}  // namespace

BlockCoder::BlockCoder(CoderKind kind, Alphabet source, std::vector<Word> blocks)
    : kind_(kind), source_(std::move(source)), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw EmptySubshift();
  p_ = static_cast<int>(blocks_.front().size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (static_cast<int>(blocks_[i].size()) != p_) throw Error("coder blocks of unequal length");
    if (!index_.emplace(blocks_[i], static_cast<Symbol>(i)).second) throw Error("duplicate coder block");
  }
  target_ = block_alphabet(source_, blocks_);
}

std::optional<Symbol> BlockCoder::symbol_of(const Word& block) const {
  auto it = index_.find(block);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Word BlockCoder::encode(const Word& w, std::size_t phase) const {
  Word out;
  const std::size_t P = static_cast<std::size_t>(p_);
  auto lookup = [&](std::size_t start) {
    Word b(w.begin() + start, w.begin() + start + P);
    auto s = symbol_of(b);
    if (!s) throw Error("word contains a block outside the coder alphabet");
    return *s;
  };
  if (kind_ == CoderKind::Block) {
    for (std::size_t z = 0; z + P <= w.size(); ++z) out.push_back(lookup(z));
  } else {
    for (std::size_t z = phase; z + P <= w.size(); z += P) out.push_back(lookup(z));
  }
  return out;
}

Word BlockCoder::decode(const Word& code) const {
  Word out;
  if (code.empty()) return out;
  if (kind_ == CoderKind::Power) {
    for (Symbol s : code) {
      const Word& b = block(s);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }
  out = block(code[0]);
  for (std::size_t i = 1; i < code.size(); ++i) {
    const Word& b = block(code[i]);
    if (!std::equal(b.begin(), b.end() - 1, out.end() - (p_ - 1)))
      throw Error("inconsistent overlapping blocks in decode");
    out.push_back(b.back());
  }
  return out;
}

// ---------------------------------------------------------------- recodings

namespace {

std::vector<Word> admissible_words(const MarkovShift& shift, int len) {
  std::vector<Word> out;
  Word cur;
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    const auto& next = cur.empty() ? shift.vertices() : shift.followers(cur.back());
    for (Symbol s : next) {
      cur.push_back(s);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

}  // namespace

Recoded sft_to_markov(const SFT& sft) {
  const int q = sft.radius();
  const Alphabet& A = sft.alphabet();
  if (q <= 2) {
    std::vector<Edge> edges;
    if (q == 1) {
      for (const Word& a : sft.admissible())
        for (const Word& b : sft.admissible()) edges.emplace_back(a[0], b[0]);
    } else {
      for (const Word& w : sft.admissible()) edges.emplace_back(w[0], w[1]);
    }
    std::vector<Word> blocks;
    for (Symbol s = 0; s < A.size(); ++s) blocks.push_back({s});
    return {MarkovShift(A, edges), BlockCoder(CoderKind::Block, A, std::move(blocks))};
  }
  std::vector<Word> blocks(sft.admissible().begin(), sft.admissible().end());
  BlockCoder coder(CoderKind::Block, A, blocks);
  std::map<Word, std::vector<Symbol>> by_prefix;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    by_prefix[Word(blocks[i].begin(), blocks[i].end() - 1)].push_back(static_cast<Symbol>(i));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Word tail(blocks[i].begin() + 1, blocks[i].end());
    auto it = by_prefix.find(tail);
    if (it == by_prefix.end()) continue;
    for (Symbol j : it->second) edges.emplace_back(static_cast<Symbol>(i), j);
  }
  return {MarkovShift(coder.target(), edges), std::move(coder)};
}

Recoded higher_block(const MarkovShift& shift, int P) {
  if (P < 1) throw Error("block length must be at least 1");
  std::vector<Word> blocks = admissible_words(shift, P);
  BlockCoder coder(CoderKind::Block, shift.alphabet(), blocks);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const Word& u = blocks[i];
      const Word& v = blocks[j];
      bool ok = P == 1 ? shift.has_edge(u[0], v[0])
                       : std::equal(u.begin() + 1, u.end(), v.begin());
      if (ok) edges.emplace_back(static_cast<Symbol>(i), static_cast<Symbol>(j));
    }
  }
  return {MarkovShift(coder.target(), edges), std::move(coder)};
}

Recoded higher_power(const MarkovShift& shift, int W) {
  if (W < 1) throw Error("power must be at least 1");
  std::vector<Word> blocks = admissible_words(shift, W);
  BlockCoder coder(CoderKind::Power, shift.alphabet(), blocks);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks.size(); ++j)
      if (shift.has_edge(blocks[i].back(), blocks[j].front()))
        edges.emplace_back(static_cast<Symbol>(i), static_cast<Symbol>(j));
  return {MarkovShift(coder.target(), edges), std::move(coder)};
}

// ---------------------------------------------------------------- structure

RegularityReport regularity(const MarkovShift& shift) {
  RegularityReport r;
  std::set<std::size_t> pin, fout;
  for (Symbol v : shift.vertices()) {
    pin.insert(shift.predecessors(v).size());
    fout.insert(shift.followers(v).size());
  }
  if (pin.size() == 1) {
    r.left_regular = true;
    r.P_S = static_cast<int>(*pin.begin());
  }
  if (fout.size() == 1) {
    r.right_regular = true;
    r.F_S = static_cast<int>(*fout.begin());
  }
  return r;
}

std::vector<std::vector<Symbol>> strongly_connected_components(const MarkovShift& shift) {
  const std::size_t n = shift.alphabet_size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<unsigned char> on_stack(n, 0);
  std::vector<Symbol> stack;
  std::vector<std::vector<Symbol>> comps;
  int counter = 0;
  std::function<void(Symbol)> strong = [&](Symbol v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (Symbol w : shift.followers(v)) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Symbol> comp;
      Symbol w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (Symbol v : shift.vertices())
    if (index[v] < 0) strong(v);
  std::sort(comps.begin(), comps.end());
  return comps;
}

namespace {

std::size_t internal_edges(const MarkovShift& shift, const std::vector<Symbol>& comp) {
  std::size_t e = 0;
  for (Symbol a : comp)
    for (Symbol b : shift.followers(a))
      if (std::binary_search(comp.begin(), comp.end(), b)) ++e;
  return e;
}

bool has_cycle(const MarkovShift& shift, const std::vector<Symbol>& comp) {
  return comp.size() > 1 || shift.has_edge(comp[0], comp[0]);
}

// Power iteration on (A+I) restricted to `verts`. Returns (rho, vector).
std::pair<double, std::vector<double>> power_iterate(const MarkovShift& shift,
                                                     const std::vector<Symbol>& verts,
                                                     bool transpose) {
  const std::size_t n = shift.alphabet_size();
  std::vector<unsigned char> in(n, 0);
  for (Symbol v : verts) in[v] = 1;
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (Symbol v : verts) x[v] = 1.0;
  double rho = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (Symbol v : verts) {
      double s = x[v];
      const auto& nb = transpose ? shift.predecessors(v) : shift.followers(v);
      for (Symbol u : nb)
        if (in[u]) s += x[u];
      y[v] = s;
    }
    double lo = INFINITY, hi = 0.0, mx = 0.0;
    for (Symbol v : verts) {
      double r = y[v] / x[v];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      mx = std::max(mx, y[v]);
    }
    for (Symbol v : verts) x[v] = y[v] / mx;
    rho = hi - 1.0;
    if (hi - lo <= 1e-12 * hi) {
      rho = 0.5 * (hi + lo) - 1.0;
      break;
    }
  }
  return {rho, x};
}

}  // namespace

bool is_union_of_cycles(const MarkovShift& shift) {
  for (const auto& comp : strongly_connected_components(shift))
    if (has_cycle(shift, comp) && internal_edges(shift, comp) != comp.size()) return false;
  return true;
}

double spectral_radius(const MarkovShift& shift) {
  return power_iterate(shift, shift.vertices(), false).first;
}

double entropy(const MarkovShift& shift) {
  if (is_union_of_cycles(shift)) return 0.0;
  double best = 1.0;
  for (const auto& comp : strongly_connected_components(shift))
    if (has_cycle(shift, comp)) best = std::max(best, power_iterate(shift, comp, false).first);
  return std::log2(best);
}

namespace {

// Simple cycles through c, as words starting at c, in lexicographic
// order; stops after `limit`.
std::vector<Word> simple_cycles_at(const MarkovShift& shift, Symbol c, std::size_t limit) {
  const std::size_t n = shift.alphabet_size();
  // Vertices that can reach c.
  std::vector<unsigned char> reach(n, 0);
  std::vector<Symbol> todo{c};
  reach[c] = 1;
  while (!todo.empty()) {
    Symbol v = todo.back();
    todo.pop_back();
    for (Symbol u : shift.predecessors(v))
      if (!reach[u]) {
        reach[u] = 1;
        todo.push_back(u);
      }
  }
  std::vector<Word> out;
  std::vector<unsigned char> on_path(n, 0);
  Word path{c};
  on_path[c] = 1;
  std::function<void()> rec = [&] {
    if (out.size() >= limit) return;
    Symbol last = path.back();
    if (shift.has_edge(last, c)) out.push_back(path);
    for (Symbol nx : shift.followers(last)) {
      if (out.size() >= limit) return;
      if (nx == c || on_path[nx] || !reach[nx]) continue;
      on_path[nx] = 1;
      path.push_back(nx);
      rec();
      path.pop_back();
      on_path[nx] = 0;
    }
  };
  rec();
  return out;
}

}  // namespace

std::optional<Symbol> choice_point(const MarkovShift& shift) {
  for (Symbol c : shift.vertices())
    if (simple_cycles_at(shift, c, 2).size() >= 2) return c;
  return std::nullopt;
}

CyclePair equal_length_cycles(const MarkovShift& shift) {
  auto c = choice_point(shift);
  if (!c) throw NoChoicePoint();
  auto cyc = simple_cycles_at(shift, *c, 2);
  const int q0 = static_cast<int>(cyc[0].size());
  const int q1 = static_cast<int>(cyc[1].size());
  const int P = std::lcm(q0, q1);
  CyclePair out{P, {}, {}};
  for (int i = 0; i < P / q0; ++i) out.c0.insert(out.c0.end(), cyc[0].begin(), cyc[0].end());
  for (int i = 0; i < P / q1; ++i) out.c1.insert(out.c1.end(), cyc[1].begin(), cyc[1].end());
  return out;
}

std::vector<MarkovShift> transitive_components(const MarkovShift& shift) {
  std::vector<MarkovShift> out;
  for (const auto& comp : strongly_connected_components(shift))
    if (has_cycle(shift, comp)) out.push_back(shift.restricted_to(comp));
  return out;
}

std::optional<int> period_of(const MarkovShift& shift) {
  auto comps = transitive_components(shift);
  if (comps.size() != 1) {
    std::ostringstream os;
    os << "period_of needs a single transitive component, found " << comps.size();
    throw Error(os.str());
  }
  const auto& v = comps[0].vertices();
  if (comps[0].edge_count() != v.size()) return std::nullopt;
  return static_cast<int>(v.size());
}

PerronData perron(const MarkovShift& shift) {
  auto comps = strongly_connected_components(shift);
  if (comps.size() != 1 || !has_cycle(shift, comps[0])) {
    std::ostringstream os;
    os << "shift is reducible; components:";
    for (const auto& c : comps) os << " " << shift.alphabet().format(c);
    throw Error(os.str());
  }
  auto [rho, right] = power_iterate(shift, shift.vertices(), false);
  auto [rho2, left] = power_iterate(shift, shift.vertices(), true);
  (void)rho2;
  return {rho, std::move(right), std::move(left)};
}

}  // namespace defectkin
