#include "defectkin/ca.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "defectkin/errors.hpp"

namespace defectkin {

namespace {

void advance_background(const LocalRule& rule, BackgroundSpec& bg) {
  if (auto* p = std::get_if<PeriodicBackground>(&bg)) {
    Word img = rule.apply_cyclic(p->word);
    if (minimal_period(img) != minimal_period(p->word))
      throw BackgroundNotClosed("background not rule-closed: period of " +
                                rule.alphabet().format(p->word) + " changes under the rule");
    p->word = std::move(img);
  }
}

}  // namespace

Configuration apply(const LocalRule& rule, Configuration c) {
  const std::int64_t r = rule.radius();
  const bool ls = c.sampled(Side::Left), rs = c.sampled(Side::Right);
  const std::int64_t lo = ls ? c.origin() : c.origin() - r;
  const std::int64_t hi = rs ? c.end() : c.end() + r;
  if (ls || rs) c.materialize(ls ? c.origin() - r : c.origin(), rs ? c.end() + r : c.end());
  Word core = rule.apply(c.window(lo - r, hi + r));
  advance_background(rule, c.background(Side::Left));
  advance_background(rule, c.background(Side::Right));
  c.set_core(std::move(core), lo);
  return c;
}

std::vector<Word> admissible_extensions(const SFT& sft, int length) {
  const int q = sft.radius();
  std::vector<Word> out;
  if (length < q) {
    std::set<Word> sub;
    for (const Word& w : sft.admissible())
      for (int i = 0; i + length <= q; ++i) sub.insert(Word(w.begin() + i, w.begin() + i + length));
    return {sub.begin(), sub.end()};
  }
  const std::size_t n = sft.alphabet().size();
  Word cur;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == length) {
      out.push_back(cur);
      return;
    }
    for (Symbol s = 0; s < n; ++s) {
      cur.push_back(s);
      if (static_cast<int>(cur.size()) < q ||
          sft.contains(Word(cur.end() - q, cur.end())))
        self(self);
      cur.pop_back();
    }
  };
  // Seed from admissible q-words to avoid exploring dead prefixes.
  for (const Word& w : sft.admissible()) {
    cur = w;
    rec(rec);
  }
  return out;
}

bool check_invariance(const LocalRule& rule, const SFT& sft) {
  for (const Word& u : admissible_extensions(sft, sft.radius() + 2 * rule.radius()))
    if (!sft.contains(rule.apply(u))) return false;
  return true;
}

bool is_onto(const LocalRule& rule, const SFT& sft) {
  std::set<Word> images;
  for (const Word& u : admissible_extensions(sft, sft.radius() + 2 * rule.radius()))
    images.insert(rule.apply(u));
  for (const Word& w : sft.admissible())
    if (!images.count(w)) return false;
  return true;
}

namespace {

bool permutative(const LocalRule& rule, const std::vector<Symbol>& sub, bool left) {
  const int w = rule.width();
  std::set<Symbol> subset(sub.begin(), sub.end());
  const std::size_t k = sub.size();
  std::size_t contexts = 1;
  for (int i = 0; i < w - 1; ++i) contexts *= k;
  Word nb(w);
  for (std::size_t c = 0; c < contexts; ++c) {
    std::size_t v = c;
    for (int i = 0; i < w - 1; ++i) {
      nb[left ? i + 1 : i] = sub[v % k];
      v /= k;
    }
    std::set<Symbol> image;
    for (Symbol a : sub) {
      nb[left ? 0 : w - 1] = a;
      Symbol out = rule(nb);
      if (!subset.count(out)) return false;
      image.insert(out);
    }
    if (image.size() != k) return false;
  }
  return true;
}

void require_radius_one(const LocalRule& rule) {
  if (rule.radius() != 1) throw Error("radius must be 1 (recode first)");
}

}  // namespace

bool is_left_permutative(const LocalRule& rule, const std::vector<Symbol>& sub) {
  return permutative(rule, sub, true);
}

bool is_right_permutative(const LocalRule& rule, const std::vector<Symbol>& sub) {
  return permutative(rule, sub, false);
}

std::optional<Word> left_resolving_witness(const LocalRule& rule, const MarkovShift& s) {
  require_radius_one(rule);
  for (Symbol b : s.vertices())
    for (Symbol c : s.followers(b))
      for (Symbol d : s.followers(c)) {
        const Symbol e = rule.at3(b, c, d);
        std::set<Symbol> seen;
        for (Symbol a : s.predecessors(b)) {
          const Symbol x = rule.at3(a, b, c);
          if (!s.has_edge(x, e) || !seen.insert(x).second) return Word{a, b, c, d};
        }
      }
  return std::nullopt;
}

std::optional<Word> right_resolving_witness(const LocalRule& rule, const MarkovShift& s) {
  require_radius_one(rule);
  for (Symbol a : s.vertices())
    for (Symbol b : s.followers(a))
      for (Symbol c : s.followers(b)) {
        const Symbol e = rule.at3(a, b, c);
        std::set<Symbol> seen;
        for (Symbol d : s.followers(c)) {
          const Symbol x = rule.at3(b, c, d);
          if (!s.has_edge(e, x) || !seen.insert(x).second) return Word{a, b, c, d};
        }
      }
  return std::nullopt;
}

bool is_left_resolving(const LocalRule& rule, const MarkovShift& s) { return !left_resolving_witness(rule, s); }

bool is_right_resolving(const LocalRule& rule, const MarkovShift& s) { return !right_resolving_witness(rule, s); }

std::vector<Word> find_travelling_wave_backgrounds(const LocalRule& rule, int p, int v, int max_period) {
  if (p < 1 || max_period < 1) throw Error("p and maxPeriod must be positive");
  const Symbol k = static_cast<Symbol>(rule.alphabet().size());
  std::vector<Word> out;
  // Lyndon words of length <= max_period in lexicographic order (Duval).
  std::vector<std::int64_t> w{-1};
  while (!w.empty()) {
    ++w.back();
    Word word(w.begin(), w.end());
    Word img = word;
    for (int i = 0; i < p; ++i) img = rule.apply_cyclic(img);
    const std::int64_t n = static_cast<std::int64_t>(word.size());
    bool ok = true;
    for (std::int64_t i = 0; i < n && ok; ++i)
      ok = img[static_cast<std::size_t>(i)] ==
           word[static_cast<std::size_t>(floor_mod(i + static_cast<std::int64_t>(p) * v, n))];
    if (ok) out.push_back(word);
    const std::size_t m = w.size();
    while (static_cast<int>(w.size()) < max_period) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == static_cast<std::int64_t>(k) - 1) w.pop_back();
  }
  return out;
}

LocalRule recode_rule(const LocalRule& rule, const BlockCoder& coder) {
  const int r = rule.radius();
  const int P = coder.length();
  if (coder.kind() == CoderKind::Block) {
    return LocalRule::from_function(coder.target(), r, [&](const Word& nb) -> Symbol {
      Word letters = coder.block(nb[0]);
      for (std::size_t i = 1; i < nb.size(); ++i) {
        const Word& prev = coder.block(nb[i - 1]);
        const Word& cur = coder.block(nb[i]);
        if (!std::equal(prev.begin() + 1, prev.end(), cur.begin())) return 0;
        letters.push_back(cur.back());
      }
      auto s = coder.symbol_of(rule.apply(letters));
      return s ? *s : 0;
    });
  }
  const int R = (r + P - 1) / P;
  return LocalRule::from_function(coder.target(), R, [&](const Word& nb) -> Symbol {
    Word letters;
    for (Symbol s : nb) {
      const Word& b = coder.block(s);
      letters.insert(letters.end(), b.begin(), b.end());
    }
    const int start = P * R - r;
    Word slice(letters.begin() + start, letters.begin() + start + P + 2 * r);
    auto s = coder.symbol_of(rule.apply(slice));
    return s ? *s : 0;
  });
}

Word cycle_word(const MarkovShift& comp) {
  Word w;
  const Symbol start = comp.vertices().front();
  Symbol v = start;
  do {
    w.push_back(v);
    if (comp.followers(v).size() != 1) throw Error("component is not a single cycle");
    v = comp.followers(v)[0];
  } while (v != start && w.size() <= comp.vertices().size());
  return w;
}

std::vector<std::vector<std::size_t>> phi_orbits_of_components(const LocalRule& rule,
                                                               const MarkovShift& shift) {
  auto comps = transitive_components(shift);
  std::vector<std::size_t> parent(comps.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].edge_count() != comps[i].vertices().size()) continue;
    Word img = rule.apply_cyclic(cycle_word(comps[i]));
    for (std::size_t j = 0; j < comps.size(); ++j)
      if (is_cyclically_admissible(comps[j], img) && comps[j].usable(img[0])) parent[find(i)] = find(j);
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(comps.size(), -1);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return groups;
}

}  // namespace defectkin
