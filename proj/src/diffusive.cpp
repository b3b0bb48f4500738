#include "defectkin/diffusive.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <thread>

#include "defectkin/errors.hpp"

namespace defectkin {

// ---------------------------------------------------------------- example

LocalRule diffuse_example_rule() {
  Alphabet A({"0", "1", "2", "3"});
  return LocalRule::from_function(A, 1, [](const Word& nb) -> Symbol {
    const Symbol a0 = nb[0] & 1, a1 = nb[1] & 1, a2 = nb[2] & 1;
    const bool b0 = nb[0] >= 2, b1 = nb[1] >= 2, b2 = nb[2] >= 2;
    Symbol a;
    if (b1)
      a = 1 - a1;
    else if (!b0 && !b2)
      a = (a0 + a1 + a2) & 1;
    else if (!b0 && b2)
      a = (a0 + a1) & 1;
    else if (b0 && !b2)
      a = (a1 + a2) & 1;
    else
      a = a1;  // dots on both sides: not reachable from a single defect
    bool b;
    if (b0 && a0 == 0 && a1 == 0)
      b = true;
    else if (b2 && a1 == 1 && a2 == 1)
      b = true;
    else if (b1 && a1 == 0 && a2 == 0)
      b = false;
    else if (b1 && a0 == 1 && a1 == 1)
      b = false;
    else
      b = b1;
    return a + (b ? 2 : 0);
  });
}

MarkovShift diffuse_example_background() {
  return MarkovShift(Alphabet({"0", "1", "2", "3"}), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

// ---------------------------------------------------------------- resolving

MarkovShift union_shift(const MarkovShift& L, const MarkovShift& R) {
  if (!(L.alphabet() == R.alphabet())) throw Error("L and R use different alphabets");
  auto edges = L.edges();
  for (const Edge& e : R.edges())
    if (!L.has_edge(e.first, e.second)) edges.push_back(e);
  return MarkovShift(L.alphabet(), edges);
}

namespace {

// A path in the union graph using an edge exclusive to L and one
// exclusive to R, if any.
std::optional<Word> mixing_path(const MarkovShift& L, const MarkovShift& R, const MarkovShift& U) {
  struct Node {
    Symbol v;
    int flags;
  };
  const std::size_t n = U.alphabet_size();
  std::vector<long> parent(n * 4, -2);
  std::deque<std::size_t> queue;
  for (Symbol v : U.vertices()) {
    parent[v * 4] = -1;
    queue.push_back(v * 4);
  }
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const Symbol v = static_cast<Symbol>(s / 4);
    const int f = static_cast<int>(s % 4);
    for (Symbol w : U.followers(v)) {
      const bool inL = L.has_edge(v, w), inR = R.has_edge(v, w);
      const int g = f | (inL && !inR ? 1 : 0) | (inR && !inL ? 2 : 0);
      const std::size_t t = w * 4 + static_cast<std::size_t>(g);
      if (parent[t] != -2) continue;
      parent[t] = static_cast<long>(s);
      if (g == 3) {
        Word path;
        for (long x = static_cast<long>(t); x >= 0; x = parent[static_cast<std::size_t>(x)])
          path.push_back(static_cast<Symbol>(x / 4));
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(t);
    }
  }
  return std::nullopt;
}

std::optional<Word> invariance_witness(const LocalRule& rule, const MarkovShift& S) {
  for (Symbol a : S.vertices())
    for (Symbol b : S.followers(a))
      for (Symbol c : S.followers(b))
        for (Symbol d : S.followers(c))
          if (!S.has_edge(rule.at3(a, b, c), rule.at3(b, c, d))) return Word{a, b, c, d};
  return std::nullopt;
}

}  // namespace

ResolvingSystemReport verify_resolving_system(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R) {
  if (rule.radius() != 1) throw Error("radius must be 1 (recode first)");
  const Alphabet& A = rule.alphabet();
  ResolvingSystemReport rep;
  const MarkovShift U = union_shift(L, R);
  if (auto w = mixing_path(L, R, U))
    rep.markov_union.witness = "L u R is not Markov: path " + A.format(*w) + " mixes L and R";
  else
    rep.markov_union.ok = true;

  auto side = [&](const MarkovShift& S, bool left) {
    ResolvingSystemReport::Condition c;
    auto reg = regularity(S);
    if (left ? !reg.left_regular : !reg.right_regular) {
      c.witness = left ? "L is not left-regular" : "R is not right-regular";
      return c;
    }
    if (auto w = invariance_witness(rule, S)) {
      c.witness = std::string(left ? "L" : "R") + " is not rule-invariant at " + A.format(*w);
      return c;
    }
    auto w = left ? left_resolving_witness(rule, S) : right_resolving_witness(rule, S);
    if (w) {
      c.witness = left ? "L is not left-resolving at " + A.format(*w) : "R is not right-resolving at " + A.format(*w);
      return c;
    }
    c.ok = true;
    return c;
  };
  rep.left = side(L, true);
  rep.right = side(R, false);
  if (auto r = regularity(L); r.P_S) rep.P_L = *r.P_S;
  if (auto r = regularity(R); r.F_S) rep.F_R = *r.F_S;
  try {
    rep.lambda = std::make_shared<const MarkovMeasure>(parry_measure(L));
    rep.rho = std::make_shared<const MarkovMeasure>(parry_measure(R));
    rep.parry.ok = true;
  } catch (const Error& e) {
    rep.parry.witness = e.what();
  }
  return rep;
}

std::vector<Word> default_defect_words(const MarkovShift& L, const MarkovShift& R, int W) {
  const MarkovShift U = union_shift(L, R);
  const std::size_t n = U.alphabet_size();
  std::vector<Word> out;
  std::size_t count = 1;
  for (int i = 0; i < W; ++i) count *= n;
  for (std::size_t c = 0; c < count; ++c) {
    Word d(static_cast<std::size_t>(W));
    std::size_t v = c;
    for (int i = W - 1; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % n);
      v /= n;
    }
    bool ok = true;
    for (Symbol l : L.vertices())
      for (Symbol r : R.vertices()) {
        Word u{l};
        u.insert(u.end(), d.begin(), d.end());
        u.push_back(r);
        for (std::size_t j = 0; j + 1 < u.size() && ok; ++j) ok = !U.has_edge(u[j], u[j + 1]);
      }
    if (ok) out.push_back(d);
  }
  if (out.empty()) throw Error("no defect words of the requested width");
  return out;
}

// ---------------------------------------------------------------- kernel

std::optional<std::size_t> WalkKernel::find(const Word& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t WalkKernel::add(const Word& x) {
  auto [it, fresh] = index_.emplace(x, states_.size());
  if (fresh) {
    states_.push_back(x);
    initial_.push_back(0.0);
  }
  return it->second;
}

namespace {

struct Located {
  std::int64_t z;  // raw centre, index into the word
  std::int64_t L, R;
};

// Single run of bad transitions inside u, centred per the tracker.
std::optional<Located> locate_in_word(const MarkovShift& U, const Word& u) {
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
  Located loc;
  loc.L = (w + 1) / 2 - 1;
  loc.R = w / 2;
  loc.z = first + loc.L + 1;
  return loc;
}

// Kernel state (cells z-2 .. z+3) from a word with the raw centre at z.
Word state_at(const Word& u, std::int64_t z) {
  if (z < 2 || z + 4 > static_cast<std::int64_t>(u.size())) throw Error("kernel state outside the word");
  return Word(u.begin() + z - 2, u.begin() + z + 4);
}

void check_padding(const Located& loc) {
  if (loc.L > 0 || loc.R > 1) throw Error("defect wider than the two-cell kernel state");
}

}  // namespace

WalkKernel build_walk_kernel(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W,
                             const std::vector<std::pair<Word, double>>& delta_in) {
  if (W < 0 || W > 2) throw Error("walk kernels support defect widths 0..2 (recode to a power first)");
  auto rep = verify_resolving_system(rule, L, R);
  if (!rep.pass()) throw Error("not a resolving system");
  const MarkovShift U = union_shift(L, R);
  std::vector<std::pair<Word, double>> delta = delta_in;
  if (delta.empty())
    for (const Word& d : default_defect_words(L, R, W)) delta.emplace_back(d, 1.0);
  double total = 0.0;
  for (auto& [d, p] : delta) total += p;

  WalkKernel K;
  K.P_L_ = rep.P_L;
  K.F_R_ = rep.F_R;
  const MarkovMeasure& lam = *rep.lambda;
  const MarkovMeasure& rho = *rep.rho;

  // Initial law: three L cells, the defect word, three R cells.
  for (Symbol a : L.vertices())
    for (Symbol b : L.followers(a))
      for (Symbol c : L.followers(b))
        for (auto& [d, pd] : delta)
          for (Symbol x : R.vertices())
            for (Symbol y : R.followers(x))
              for (Symbol z : R.followers(y)) {
                const double p = lam.initial[a] * lam.kernel[a][b] * lam.kernel[b][c] * pd / total *
                                 rho.initial[x] * rho.kernel[x][y] * rho.kernel[y][z];
                if (p == 0.0) continue;
                Word u{a, b, c};
                u.insert(u.end(), d.begin(), d.end());
                u.insert(u.end(), {x, y, z});
                auto loc = locate_in_word(U, u);
                if (!loc) throw Error("initial defect word " + rule.alphabet().format(d) + " is admissible");
                check_padding(*loc);
                K.initial_[K.add(state_at(u, loc->z))] += p;
              }

  auto phi = [&](Symbol a, Symbol b, Symbol c) { return rule.at3(a, b, c); };
  for (std::size_t i = 0; i < K.states_.size(); ++i) {
    const Word x = K.states_[i];
    const Symbol l2 = x[0], l1 = x[1], d0 = x[2], d1 = x[3], r1 = x[4], r2 = x[5];
    // Velocity and next defect word by direct evaluation, over every
    // admissible outer letter; both must not depend on it.
    std::optional<std::pair<int, Word>> next;
    for (Symbol l3 : L.predecessors(l2))
      for (Symbol r3 : R.followers(r2)) {
        Word u{l3};
        u.insert(u.end(), x.begin(), x.end());
        u.push_back(r3);
        const Word img = rule.apply(u);  // cells z-2 .. z+3
        auto loc = locate_in_word(U, img);
        if (!loc) throw Error("defect vanished in kernel state " + rule.alphabet().format(x));
        check_padding(*loc);
        const int v = static_cast<int>(loc->z - 2);
        const Word dn(img.begin() + loc->z, img.begin() + loc->z + 2);
        if (next && (next->first != v || next->second != dn))
          throw Error("velocity is not a function of the kernel state " + rule.alphabet().format(x));
        next = std::make_pair(v, dn);
      }
    if (!next) throw Error("kernel state without admissible extension");
    const int v = next->first;
    if (v < -1 || v > 1) throw Error("kernel velocity outside [-1, 1]");
    K.velocity_.push_back(v);

    std::map<Word, Rational> row;
    auto emit = [&](const Word& y, Rational mass) {
      if (Word(y.begin() + 2, y.begin() + 4) != next->second)
        throw Error("kernel successor formula disagrees with the rule in state " + rule.alphabet().format(x));
      row[y] += mass;
    };
    if (v == 0) {
      const Symbol nl1 = phi(l2, l1, d0), nr1 = phi(d1, r1, r2);
      const Rational m(1, static_cast<std::int64_t>(K.P_L_) * K.F_R_);
      for (Symbol nl2 : L.predecessors(nl1))
        for (Symbol nr2 : R.followers(nr1)) emit({nl2, nl1, phi(l1, d0, d1), phi(d0, d1, r1), nr1, nr2}, m);
    } else if (v == -1) {
      const Rational m(1, static_cast<std::int64_t>(K.P_L_) * K.P_L_);
      std::set<Symbol> firsts;
      for (Symbol a : L.predecessors(l2)) firsts.insert(phi(a, l2, l1));
      for (Symbol nl1 : firsts)
        for (Symbol nl2 : L.predecessors(nl1))
          emit({nl2, nl1, phi(l2, l1, d0), phi(l1, d0, d1), phi(d0, d1, r1), phi(d1, r1, r2)}, m);
    } else {
      const Rational m(1, static_cast<std::int64_t>(K.F_R_) * K.F_R_);
      std::set<Symbol> firsts;
      for (Symbol c : R.followers(r2)) firsts.insert(phi(r1, r2, c));
      for (Symbol nr1 : firsts)
        for (Symbol nr2 : R.followers(nr1))
          emit({phi(l2, l1, d0), phi(l1, d0, d1), phi(d0, d1, r1), phi(d1, r1, r2), nr1, nr2}, m);
    }
    Rational sum(0);
    std::vector<std::pair<std::size_t, Rational>> out;
    for (auto& [y, m] : row) {
      sum += m;
      out.emplace_back(K.add(y), m);
    }
    if (sum != Rational(1)) {
      std::ostringstream os;
      os << "kernel row of " << rule.alphabet().format(x) << " sums to " << sum;
      throw Error(os.str());
    }
    K.rows_.push_back(std::move(out));
  }
  return K;
}

// ---------------------------------------------------------------- stationary

std::vector<RecurrentClass> stationary_and_drift(const WalkKernel& K) {
  const std::size_t n = K.size();
  // Tarjan over the support graph.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  auto strong = [&](auto&& self, std::size_t v) -> void {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (auto& [w, m] : K.row(v)) {
      if (index[w] < 0) {
        self(self, w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0) strong(strong, v);
  std::vector<bool> closed(static_cast<std::size_t>(ncomp), true);
  for (std::size_t v = 0; v < n; ++v)
    for (auto& [w, m] : K.row(v))
      if (comp[w] != comp[v]) closed[static_cast<std::size_t>(comp[v])] = false;

  std::vector<RecurrentClass> out;
  for (int c = 0; c < ncomp; ++c) {
    if (!closed[static_cast<std::size_t>(c)]) continue;
    RecurrentClass rc;
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) {
        pos[v] = rc.states.size();
        rc.states.push_back(v);
      }
    const std::size_t m = rc.states.size();
    std::vector<double> pi(m, 1.0 / static_cast<double>(m)), nxt(m);
    // Lazy chain: same stationary law, aperiodic.
    for (int it = 0; it < 1000000; ++it) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        nxt[a] += 0.5 * pi[a];
        for (auto& [w, mass] : K.row(rc.states[a]))
          nxt[pos[w]] += 0.5 * pi[a] * boost::rational_cast<double>(mass);
      }
      double diff = 0.0;
      for (std::size_t a = 0; a < m; ++a) diff = std::max(diff, std::abs(nxt[a] - pi[a]));
      pi.swap(nxt);
      if (diff < 1e-15) break;
    }
    rc.stationary = pi;
    for (std::size_t a = 0; a < m; ++a) rc.drift += pi[a] * K.velocity(rc.states[a]);
    out.push_back(std::move(rc));
  }
  return out;
}

// ---------------------------------------------------------------- sampling

namespace {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void finish_statistics(WalkResult& res, std::size_t nstates, std::int64_t steps) {
  WalkStatistics& st = res.stats;
  st.samples = res.samples.size();
  st.horizon = steps;
  st.visits.assign(nstates, 0);
  double sum = 0.0, sum2 = 0.0;
  std::size_t kept = 0;
  for (const auto& s : res.samples) {
    if (s.excluded) {
      ++st.excluded;
      continue;
    }
    ++kept;
    const double dz = static_cast<double>(s.z.back() - s.z.front());
    sum += dz;
    sum2 += dz * dz;
    for (std::size_t t = 0; t + 1 < s.states.size(); ++t) {
      if (s.states[t] < 0 || s.states[t + 1] < 0) continue;
      const auto a = static_cast<std::size_t>(s.states[t]), b = static_cast<std::size_t>(s.states[t + 1]);
      ++st.visits[a];
      ++st.transitions[{a, b}];
    }
  }
  if (kept == 0) throw Error("every walk sample was excluded");
  if (static_cast<double>(st.excluded) > 0.001 * static_cast<double>(st.samples))
    throw Error("too many excluded walk samples (vanished or split defects)");
  const double T = static_cast<double>(steps);
  const double mean = sum / static_cast<double>(kept);
  st.drift = mean / T;
  st.variance_per_step = kept > 1 ? (sum2 / static_cast<double>(kept) - mean * mean) / T : 0.0;
}

Word draw_defect(Rng& rng, const std::vector<std::pair<Word, double>>& delta) {
  std::vector<double> p;
  double total = 0.0;
  for (auto& [d, w] : delta) total += w;
  for (auto& [d, w] : delta) p.push_back(w / total);
  return delta[sample_from(rng, p)].first;
}

WalkSample run_tracked(const LocalRule& rule, const WindowLanguage& lang, Configuration cfg,
                       const WalkKernel* kernel, std::int64_t steps, std::int64_t stride) {
  WalkSample s;
  auto record = [&](const DefectTracker& tr) {
    const DefectRecord& r = *tr.current();
    s.z.push_back(r.z);
    if (kernel) {
      auto idx = kernel->find(tr.config().window(r.z - 2, r.z + 4));
      if (!idx) throw Error("walk left the kernel state space");
      s.states.push_back(static_cast<int>(*idx));
    }
  };
  DefectTracker tr(rule, lang, std::move(cfg));
  if (!tr.current()) {
    s.excluded = true;
    s.reason = "no defect";
    return s;
  }
  record(tr);
  for (std::int64_t t = 1; t <= steps; ++t) {
    try {
      if (!tr.step()) {
        s.excluded = true;
        s.reason = "vanished";
        return s;
      }
    } catch (const MultipleDefects&) {
      s.excluded = true;
      s.reason = "split";
      return s;
    }
    if (t % stride == 0) record(tr);
  }
  return s;
}

}  // namespace

WalkResult sample_walks(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W,
                        const WalkKernel* kernel, const WalkOptions& options) {
  auto rep = verify_resolving_system(rule, L, R);
  if (!rep.pass()) throw Error("not a resolving system");
  auto delta = options.delta;
  if (delta.empty())
    for (const Word& d : default_defect_words(L, R, W)) delta.emplace_back(d, 1.0);
  const WindowLanguage lang = WindowLanguage::markov(union_shift(L, R));
  WalkResult res;
  res.samples.resize(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(options.seed, i);
    Rng rng(derive_seed(seed, 0));
    Word d = draw_defect(rng, delta);
    Configuration cfg(SampledStream(rep.lambda, Side::Left, derive_seed(seed, 1)), std::move(d), 0,
                      SampledStream(rep.rho, Side::Right, derive_seed(seed, 2)));
    res.samples[i] = run_tracked(rule, lang, std::move(cfg), kernel, options.steps, 1);
  });
  finish_statistics(res, kernel ? kernel->size() : 0, options.steps);
  return res;
}

WalkResult sample_kernel_walks(const WalkKernel& K, const WalkOptions& options) {
  WalkResult res;
  res.samples.resize(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    Rng rng(derive_seed(options.seed, i));
    WalkSample s;
    std::size_t x = sample_from(rng, K.initial());
    std::int64_t z = 0;
    s.z.push_back(z);
    s.states.push_back(static_cast<int>(x));
    for (std::int64_t t = 0; t < options.steps; ++t) {
      z += K.velocity(x);
      const auto& row = K.row(x);
      // Rows are uniform on their support, so an index draw is exact.
      x = row[uniform_index(rng, row.size())].first;
      s.z.push_back(z);
      s.states.push_back(static_cast<int>(x));
    }
    res.samples[i] = std::move(s);
  });
  for (std::size_t x = 0; x < K.size(); ++x)
    for (auto& [y, m] : K.row(x))
      if (m != K.row(x).front().second) throw Error("direct kernel sampler needs uniform rows");
  finish_statistics(res, K.size(), options.steps);
  return res;
}

// ---------------------------------------------------------------- tests

namespace {

RowTest compare_row(std::size_t state, const std::map<std::size_t, std::uint64_t>& counts,
                    const std::vector<std::pair<std::size_t, Rational>>& row) {
  RowTest rt{state, 0, 0.0, false, true};
  for (auto& [y, c] : counts) rt.visits += c;
  if (rt.visits < kMinVisits) return rt;
  rt.conclusive = true;
  const double n = static_cast<double>(rt.visits);
  std::map<std::size_t, double> theo;
  for (auto& [y, m] : row) theo[y] = boost::rational_cast<double>(m);
  std::set<std::size_t> keys;
  for (auto& [y, p] : theo) keys.insert(y);
  for (auto& [y, c] : counts) keys.insert(y);
  double tv = 0.0;
  bool binom_ok = true;
  for (std::size_t y : keys) {
    const double p = theo.count(y) ? theo[y] : 0.0;
    auto it = counts.find(y);
    const double e = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    tv += std::abs(e - p);
    if (std::abs(e - p) > 3.0 * std::sqrt(p * (1.0 - p) / n) && !(p == 0.0 && e == 0.0)) binom_ok = false;
  }
  rt.tv = tv / 2.0;
  rt.pass = rt.visits >= kTvVisits ? rt.tv <= kTvTolerance : binom_ok;
  return rt;
}

}  // namespace

MarkovTestReport markov_property_test(const WalkResult& walks, const WalkKernel& K) {
  std::vector<std::map<std::size_t, std::uint64_t>> counts(K.size());
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, std::uint64_t>> counts2;
  for (const auto& s : walks.samples) {
    if (s.excluded) continue;
    for (std::size_t t = 0; t + 1 < s.states.size(); ++t) {
      if (s.states[t] < 0 || s.states[t + 1] < 0) continue;
      const auto a = static_cast<std::size_t>(s.states[t]), b = static_cast<std::size_t>(s.states[t + 1]);
      ++counts[a][b];
      if (t > 0 && s.states[t - 1] >= 0) ++counts2[{static_cast<std::size_t>(s.states[t - 1]), a}][b];
    }
  }
  MarkovTestReport rep;
  std::uint64_t total = 0;
  double weighted = 0.0;
  for (std::size_t x = 0; x < K.size(); ++x) {
    RowTest rt = compare_row(x, counts[x], K.row(x));
    if (rt.visits == 0) continue;
    if (!rt.conclusive) {
      ++rep.inconclusive;
    } else {
      rep.max_tv = std::max(rep.max_tv, rt.tv);
      weighted += rt.tv * static_cast<double>(rt.visits);
      total += rt.visits;
      rep.pass = rep.pass && rt.pass;
    }
    rep.rows.push_back(rt);
  }
  rep.weighted_tv = total ? weighted / static_cast<double>(total) : 0.0;
  for (auto& [key, c] : counts2) {
    RowTest rt = compare_row(key.second, c, K.row(key.second));
    if (!rt.conclusive) continue;
    rep.max_tv_order1 = std::max(rep.max_tv_order1, rt.tv);
    rep.pass_order1 = rep.pass_order1 && rt.pass;
  }
  return rep;
}

// ---------------------------------------------------------------- fixed side

WalkResult fixed_side_walk(const LocalRule& rule, Side fixed_side, const std::vector<Word>& fixed_points,
                          const MarkovShift& other, int p, int q, int W, WalkOptions options) {
  if (p < 1 || q < 1) throw Error("p and q must be positive");
  if (fixed_points.empty()) throw Error("no fixed points given");
  for (const Word& w : fixed_points) {
    Word img = w;
    for (int i = 0; i < p; ++i) img = rule.apply_cyclic(img);
    const auto n = static_cast<std::int64_t>(w.size());
    for (std::int64_t i = 0; i < n; ++i)
      if (img[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(floor_mod(i + q, n))])
        throw Error("background " + rule.alphabet().format(w) + " is not fixed by Phi^p sigma^-q");
  }
  const MarkovShift fixed = MarkovShift::from_cycles(rule.alphabet(), fixed_points);
  const MarkovShift& L = fixed_side == Side::Left ? fixed : other;
  const MarkovShift& R = fixed_side == Side::Left ? other : fixed;
  const bool other_ok = fixed_side == Side::Left ? !right_resolving_witness(rule, other) && regularity(other).right_regular
                                                 : !left_resolving_witness(rule, other) && regularity(other).left_regular;
  if (!other_ok) throw Error("the sampled side must be regular and resolving");
  auto measure = std::make_shared<const MarkovMeasure>(parry_measure(other));
  auto delta = options.delta;
  if (delta.empty())
    for (const Word& d : default_defect_words(L, R, W)) delta.emplace_back(d, 1.0);
  const WindowLanguage lang = WindowLanguage::markov(union_shift(L, R));
  const Side sampled = fixed_side == Side::Left ? Side::Right : Side::Left;
  WalkResult res;
  res.samples.resize(options.samples);
  parallel_for(options.samples, options.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(options.seed, i);
    Rng rng(derive_seed(seed, 0));
    const Word& fp = fixed_points[uniform_index(rng, fixed_points.size())];
    Word d = draw_defect(rng, delta);
    const auto len = static_cast<std::int64_t>(d.size());
    BackgroundSpec fixed_bg = fixed_side == Side::Left
                                  ? PeriodicBackground{fp, -static_cast<std::int64_t>(fp.size())}
                                  : PeriodicBackground{fp, len};
    BackgroundSpec noise = SampledStream(measure, sampled, derive_seed(seed, 1));
    Configuration cfg = fixed_side == Side::Left ? Configuration(std::move(fixed_bg), std::move(d), 0, std::move(noise))
                                                 : Configuration(std::move(noise), std::move(d), 0, std::move(fixed_bg));
    res.samples[i] = run_tracked(rule, lang, std::move(cfg), nullptr, options.steps * p, p);
  });
  finish_statistics(res, 0, options.steps);
  return res;
}

}  // namespace defectkin
