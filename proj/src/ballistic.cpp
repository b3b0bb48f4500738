#include "defectkin/ballistic.hpp"

#include <algorithm>
#include <numeric>

#include "defectkin/errors.hpp"

namespace defectkin {

namespace {

Word primitive_root(const Word& w) {
  Word root(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(minimal_period(w)));
  return least_rotation(root);
}

// off with img[i] == target[(i + off) mod n] for all i, if any.
std::optional<std::size_t> rotation_offset(const Word& img, const Word& target) {
  const std::size_t n = target.size();
  if (img.size() != n) return std::nullopt;
  for (std::size_t off = 0; off < n; ++off) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = img[i] == target[(i + off) % n];
    if (ok) return off;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- codes

PeriodicCode::PeriodicCode(const LocalRule& rule, std::vector<Word> orbit, int block_length)
    : words_(std::move(orbit)), block_length_(block_length) {
  if (words_.empty()) throw Error("empty component orbit");
  for (std::size_t w = 0; w < words_.size(); ++w) {
    offset_.push_back(entries_.size());
    for (std::size_t p = 0; p < words_[w].size(); ++p) entries_.push_back({w, p});
  }
  rule_word_.resize(words_.size());
  rule_off_.resize(words_.size());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    Word img = rule.apply_cyclic(words_[w]);
    bool found = false;
    for (std::size_t v = 0; v < words_.size() && !found; ++v)
      if (auto off = rotation_offset(img, words_[v])) {
        rule_word_[w] = v;
        rule_off_[w] = *off;
        found = true;
      }
    if (!found)
      throw BackgroundNotClosed("image of component " + rule.alphabet().format(words_[w]) +
                                " lies outside its orbit");
  }
  // One Phi-orbit: following rule_word_ from word 0 must visit every word.
  std::vector<bool> seen(words_.size(), false);
  std::size_t w = 0;
  while (!seen[w]) {
    seen[w] = true;
    w = rule_word_[w];
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw Error("not transitive");

  for (std::size_t s = 0; s < entries_.size(); ++s) {
    const auto& e = entries_[s];
    shift_.push_back(index_of(e.word, static_cast<std::int64_t>(e.phase) + 1));
    rule_.push_back(index_of(rule_word_[e.word], static_cast<std::int64_t>(e.phase + rule_off_[e.word])));
  }
  for (const Word& word : words_) spatial_ = std::lcm(spatial_, static_cast<int>(word.size()));
  std::vector<bool> done(entries_.size(), false);
  for (std::size_t s = 0; s < entries_.size(); ++s) {
    if (done[s]) continue;
    int len = 0;
    for (std::size_t x = s; !done[x]; x = rule_[x]) {
      done[x] = true;
      ++len;
    }
    temporal_ = std::lcm(temporal_, len);
  }
}

std::size_t PeriodicCode::index_of(std::size_t word, std::int64_t phase) const {
  const auto n = static_cast<std::int64_t>(words_.at(word).size());
  return offset_[word] + static_cast<std::size_t>(floor_mod(phase, n));
}

std::size_t PeriodicCode::advance(std::size_t s, std::int64_t v) const {
  const auto& e = entries_.at(s);
  return index_of(rule_word_[e.word], static_cast<std::int64_t>(e.phase + rule_off_[e.word]) + v);
}

Word PeriodicCode::block(std::size_t s) const {
  const auto& e = entries_.at(s);
  const Word& w = words_[e.word];
  Word out;
  for (int i = 0; i < block_length_; ++i) out.push_back(w[(e.phase + static_cast<std::size_t>(i)) % w.size()]);
  return out;
}

std::vector<std::vector<Word>> periodic_orbits(const LocalRule& rule, const WindowLanguage& lang) {
  std::vector<Word> words;
  for (const auto& comp : transitive_components(lang.block_shift())) {
    if (comp.edge_count() != comp.vertices().size()) throw Error("component not periodic");
    Word letters;
    for (Symbol b : cycle_word(comp)) letters.push_back(lang.coder().block(b)[0]);
    Word root = primitive_root(letters);
    if (std::find(words.begin(), words.end(), root) == words.end()) words.push_back(root);
  }
  std::sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<std::size_t> parent(words.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    Word img = primitive_root(rule.apply_cyclic(words[i]));
    auto it = std::find(words.begin(), words.end(), img);
    if (it == words.end())
      throw BackgroundNotClosed("image of component " + rule.alphabet().format(words[i]) +
                                " is not a background component");
    parent[find(i)] = find(static_cast<std::size_t>(it - words.begin()));
  }
  std::vector<std::vector<Word>> groups;
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto [it, fresh] = slot.emplace(find(i), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(words[i]);
  }
  return groups;
}

PeriodicCode build_periodic_code(const MarkovShift& component, const LocalRule& rule) {
  auto comps = transitive_components(component);
  if (comps.size() != 1) throw Error("not transitive");
  if (comps[0].edge_count() != comps[0].vertices().size()) throw Error("component not periodic");
  std::vector<Word> orbit{primitive_root(cycle_word(comps[0]))};
  for (;;) {
    Word img = primitive_root(rule.apply_cyclic(orbit.back()));
    if (std::find(orbit.begin(), orbit.end(), img) != orbit.end()) break;
    orbit.push_back(img);
  }
  return PeriodicCode(rule, std::move(orbit), 1);
}

// ---------------------------------------------------------------- system

KinematicSystem::KinematicSystem(LocalRule rule, WindowLanguage lang, std::vector<PeriodicCode> codes,
                                 DefectAutomaton automaton)
    : rule_(std::move(rule)), lang_(std::move(lang)), codes_(std::move(codes)), automaton_(std::move(automaton)) {}

Configuration KinematicSystem::realize(const KState& x, std::int64_t z) const {
  const std::int64_t L = automaton_.L(), R = automaton_.R();
  const auto& lc = codes_.at(x.l.group);
  const auto& rc = codes_.at(x.r.group);
  const auto& le = lc.entry(x.l.symbol);
  const auto& re = rc.entry(x.r.symbol);
  const std::int64_t x0 = z - L - lc.block_length();
  const std::int64_t y0 = z + R + 1;
  return Configuration(PeriodicBackground{lc.words()[le.word], x0 - static_cast<std::int64_t>(le.phase)}, x.d,
                       z - L, PeriodicBackground{rc.words()[re.word], y0 - static_cast<std::int64_t>(re.phase)});
}

CodeRef KinematicSystem::code_of(const PeriodicBackground& bg, std::int64_t block_start) const {
  const Word root = primitive_root(bg.word);
  for (std::size_t g = 0; g < codes_.size(); ++g) {
    const auto& words = codes_[g].words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (words[w] != root) continue;
      const auto n = static_cast<std::int64_t>(root.size());
      for (std::int64_t u = 0; u < n; ++u) {
        bool ok = true;
        for (std::int64_t c = 0; c < n && ok; ++c) ok = bg.at(c) == root[static_cast<std::size_t>(floor_mod(c + u, n))];
        if (ok) return {g, codes_[g].index_of(w, block_start + u)};
      }
    }
  }
  throw Error("background " + rule_.alphabet().format(bg.word) + " is not a periodic component");
}

KState KinematicSystem::state_of(const Configuration& config, const DefectRecord& raw) const {
  const std::int64_t L = automaton_.L(), R = automaton_.R();
  if (raw.raw_L > L || raw.raw_R > R) throw NotAFunction("defect outgrew the automaton padding");
  auto* lb = std::get_if<PeriodicBackground>(&config.left());
  auto* rb = std::get_if<PeriodicBackground>(&config.right());
  if (!lb || !rb) throw Error("kinematic states need periodic backgrounds");
  const std::int64_t x = raw.z - L - 1, y = raw.z + R + 1;
  for (std::int64_t c = config.origin(); c <= x; ++c)
    if (config.at(c) != lb->at(c)) throw Error("left side is not a periodic background");
  for (std::int64_t c = y; c < config.end(); ++c)
    if (config.at(c) != rb->at(c)) throw Error("right side is not a periodic background");
  const int P = lang_.block_length();
  return {code_of(*lb, x - P + 1), pad_to_constant_width(raw, config, L, R).d, code_of(*rb, y)};
}

std::optional<std::size_t> KinematicSystem::find(const KState& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t KinematicSystem::add(const KState& x) {
  auto [it, fresh] = index_.emplace(x, states_.size());
  if (fresh) states_.push_back(x);
  return it->second;
}

std::pair<KState, int> KinematicSystem::evaluate(const KState& x) {
  DefectTracker tr(rule_, lang_, realize(x));
  const auto cur = tr.current();
  if (!cur || cur->z != 0) throw Error("state does not realize its own defect");
  const AutomatonInput in = automaton_.input_of(tr.config(), *cur);
  const auto nxt = tr.step();
  if (!nxt) throw Error("defect vanished from a kinematic state");
  const KState direct = state_of(tr.config(), *nxt);
  const int v = static_cast<int>(nxt->z);
  AutomatonOutput out{direct.d, v};
  if (auto known = automaton_.lookup(in)) {
    if (!(*known == out)) throw NotAFunction("defect automaton is not a function");
  } else {
    automaton_.record(in, out);
  }
  // The update formula: rule then shift^v on each background code.
  KState formula{{x.l.group, codes_[x.l.group].advance(x.l.symbol, v)}, out.state,
                 {x.r.group, codes_[x.r.group].advance(x.r.symbol, v)}};
  if (formula != direct) throw Error("kinematic update disagrees with simulation");
  return {formula, v};
}

void KinematicSystem::close() {
  while (next_.size() < states_.size()) {
    const std::size_t i = next_.size();
    auto [img, v] = evaluate(states_[i]);
    const std::size_t j = add(img);
    next_.push_back(j);
    velocity_.push_back(v);
  }
}

// ---------------------------------------------------------------- types

int ParticleType::displacement() const { return std::accumulate(velocities.begin(), velocities.end(), 0); }

std::vector<ParticleType> enumerate_particle_types(const KinematicSystem& system) {
  const std::size_t n = system.size();
  std::vector<int> color(n, 0);
  std::vector<ParticleType> out;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> path;
    std::size_t x = s;
    while (color[x] == 0) {
      color[x] = 1;
      path.push_back(x);
      x = system.next(x);
    }
    if (color[x] == 1) {
      ParticleType t;
      auto it = std::find(path.begin(), path.end(), x);
      for (; it != path.end(); ++it) {
        t.orbit.push_back(*it);
        t.velocities.push_back(system.velocity(*it));
      }
      out.push_back(std::move(t));
    }
    for (std::size_t p : path) color[p] = 2;
  }
  return out;
}

std::vector<Transient> transients(const KinematicSystem& system, const std::vector<ParticleType>& types) {
  std::map<std::size_t, std::size_t> on_cycle;
  for (std::size_t t = 0; t < types.size(); ++t)
    for (std::size_t s : types[t].orbit) on_cycle[s] = t;
  std::vector<Transient> out;
  for (std::size_t s = 0; s < system.size(); ++s) {
    if (on_cycle.count(s)) continue;
    int depth = 0;
    std::size_t x = s;
    while (!on_cycle.count(x)) {
      x = system.next(x);
      ++depth;
    }
    out.push_back({s, on_cycle[x], depth});
  }
  return out;
}

std::vector<std::int64_t> predict_trajectory(const ParticleType& type, std::size_t phase, std::int64_t z0,
                                             std::int64_t T) {
  std::vector<std::int64_t> z{z0};
  const std::size_t P = type.orbit.size();
  for (std::int64_t t = 0; t < T; ++t) z.push_back(z.back() + type.velocities[(phase + static_cast<std::size_t>(t)) % P]);
  return z;
}

bool verify_conjugacy(const KinematicSystem& system, const ParticleType& type) {
  for (std::size_t k = 0; k < type.orbit.size(); ++k) {
    const KState& x = system.state(type.orbit[k]);
    DefectTracker tr(system.rule(), system.language(), system.realize(x));
    std::optional<DefectRecord> rec = tr.current();
    for (int t = 0; t < type.period() && rec; ++t) rec = tr.step();
    if (!rec || rec->z != type.displacement()) return false;
    if (system.state_of(tr.config(), *rec) != x) return false;
  }
  return true;
}

Presentation present(const KinematicSystem& system, std::size_t state) {
  const Configuration c = system.realize(system.state(state));
  auto iv = locate_defect(c, system.language());
  if (!iv) throw Error("state has no defect");
  const DefectRecord r = record_from_interval(c, *iv, 0);
  const int P = system.language().block_length();
  return {fused_word(c, r, system.language()), c.window(r.z - r.L - P, r.z - r.L), r.d,
          c.window(r.z + r.R + 1, r.z + r.R + 1 + P), system.velocity(state)};
}

// ---------------------------------------------------------------- pipeline

std::vector<Configuration> enumerate_seeds(const LocalRule& rule, const WindowLanguage& lang, int max_middle) {
  std::vector<Word> words;
  for (const auto& g : periodic_orbits(rule, lang)) words.insert(words.end(), g.begin(), g.end());
  const auto n = static_cast<Symbol>(lang.alphabet_size());
  std::vector<Configuration> out;
  for (int m = 0; m <= max_middle; ++m) {
    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= n;
    for (const Word& wl : words)
      for (std::size_t jl = 0; jl < wl.size(); ++jl)
        for (const Word& wr : words)
          for (std::size_t jr = 0; jr < wr.size(); ++jr)
            for (std::size_t c = 0; c < count; ++c) {
              Word mid(static_cast<std::size_t>(m));
              std::size_t v = c;
              for (int i = m - 1; i >= 0; --i) {
                mid[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % n);
                v /= n;
              }
              Configuration cfg(PeriodicBackground{wl, -1 - static_cast<std::int64_t>(jl)}, mid, 0,
                                PeriodicBackground{wr, m - static_cast<std::int64_t>(jr)});
              try {
                if (locate_defect(cfg, lang)) out.push_back(std::move(cfg));
              } catch (const MultipleDefects&) {
              }
            }
  }
  return out;
}

Classification classify(const LocalRule& rule, const WindowLanguage& lang, const std::vector<Configuration>& seeds,
                        const ClassifyOptions& options) {
  auto orbits = periodic_orbits(rule, lang);
  std::vector<PeriodicCode> codes;
  for (auto& g : orbits) codes.emplace_back(rule, g, lang.block_length());

  auto group_of = [&](const BackgroundSpec& bg) -> std::size_t {
    auto* p = std::get_if<PeriodicBackground>(&bg);
    if (!p) throw Error("classify needs periodic backgrounds");
    const Word root = primitive_root(p->word);
    for (std::size_t g = 0; g < orbits.size(); ++g)
      if (std::find(orbits[g].begin(), orbits[g].end(), root) != orbits[g].end()) return g;
    throw Error("background " + rule.alphabet().format(p->word) + " is not a periodic component");
  };

  Classification out;
  out.seeds = seeds.size();
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Configuration>> groups;
  for (const auto& seed : seeds) {
    auto traj = track(rule, lang, seed, options.steps, options.width_cap);
    std::string kind = traj.verdict.str();
    kind = kind.substr(0, kind.find('('));
    ++out.verdict_counts[kind];
    if (traj.verdict.kind != Verdict::Kind::Particle) continue;
    ++out.particle_seeds;
    groups[{group_of(seed.left()), group_of(seed.right())}].push_back(seed);
  }

  for (auto& [key, members] : groups) {
    KinematicSystem sys(rule, lang, codes, extract_automaton(rule, lang, members, options.steps, options.width_cap));
    for (const auto& seed : members) {
      DefectTracker tr(rule, lang, seed);
      for (std::int64_t t = 0; t <= options.steps; ++t) {
        sys.add(sys.state_of(tr.config(), *tr.current()));
        if (t < options.steps) tr.step();
      }
    }
    sys.close();
    auto types = enumerate_particle_types(sys);
    auto trans = transients(sys, types);
    const std::size_t si = out.systems.size();
    for (std::size_t ti = 0; ti < types.size(); ++ti) {
      const auto& t = types[ti];
      const KState& x = sys.state(t.orbit[0]);
      TypeReport rep;
      rep.left_component = codes[x.l.group].words()[codes[x.l.group].entry(x.l.symbol).word];
      rep.right_component = codes[x.r.group].words()[codes[x.r.group].entry(x.r.symbol).word];
      rep.period = t.period();
      rep.displacement = t.displacement();
      for (std::size_t s : t.orbit) rep.members.push_back(present(sys, s));
      rep.system = si;
      rep.type = ti;
      out.reports.push_back(std::move(rep));
    }
    out.systems.push_back(std::move(sys));
    out.types.push_back(std::move(types));
    out.transients.push_back(std::move(trans));
  }
  return out;
}

}  // namespace defectkin
