#include "defectkin/defect.hpp"

#include <algorithm>
#include <sstream>

#include "defectkin/errors.hpp"

namespace defectkin {

// ---------------------------------------------------------------- language

std::size_t WindowLanguage::WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Symbol s : w) h = (h ^ s) * 1099511628211ULL;
  return h;
}

WindowLanguage::WindowLanguage(std::optional<MarkovShift> markov, int q, int offset, std::size_t n,
                               std::vector<Word> words, MarkovShift block_shift, BlockCoder coder)
    : markov_(std::move(markov)),
      q_(q),
      offset_(offset),
      n_(n),
      words_(words.begin(), words.end()),
      block_shift_(std::move(block_shift)),
      coder_(std::move(coder)) {}

WindowLanguage WindowLanguage::markov(const MarkovShift& shift) {
  std::vector<Word> blocks;
  for (Symbol s = 0; s < shift.alphabet_size(); ++s) blocks.push_back({s});
  return WindowLanguage(shift, 2, 0, shift.alphabet_size(), {}, shift,
                        BlockCoder(CoderKind::Block, shift.alphabet(), std::move(blocks)));
}

WindowLanguage WindowLanguage::sft(const SFT& sft, std::optional<int> offset) {
  Recoded rec = sft_to_markov(sft);
  if (sft.radius() <= 2) return markov(rec.shift);
  const int q = sft.radius();
  // Keep only blocks that survive pruning in block space.
  std::vector<Word> words;
  for (Symbol v : rec.shift.vertices()) words.push_back(rec.coder.block(v));
  return WindowLanguage(std::nullopt, q, offset.value_or(-(q / 2)), sft.alphabet().size(),
                        std::move(words), rec.shift, rec.coder);
}

bool WindowLanguage::window_ok(const Symbol* w) const {
  if (markov_) return markov_->has_edge(w[0], w[1]);
  return words_.count(Word(w, w + q_)) != 0;
}

// ---------------------------------------------------------------- location

DefectRecord record_from_interval(const Configuration& config, const DefectInterval& iv, std::int64_t t) {
  const std::int64_t w = iv.width();
  DefectRecord r;
  r.t = t;
  r.L = (w + 1) / 2 - 1;  // ceil(w/2) - 1
  r.R = w / 2;
  r.z = iv.i + r.L + 1;
  r.raw_L = r.L;
  r.raw_R = r.R;
  r.d = config.window(r.z - r.L, r.z + r.R + 1);
  return r;
}

namespace {

// Bad transition indices in the scannable range, ascending.
std::vector<std::int64_t> bad_transitions(const Configuration& c, const WindowLanguage& lang) {
  const bool lp = !c.sampled(Side::Left), rp = !c.sampled(Side::Right);
  std::vector<std::int64_t> bad;
  if (lang.markov_mode()) {
    const std::int64_t lo = lp ? c.origin() - 1 : c.origin();
    const std::int64_t hi = rp ? c.end() - 1 : c.end() - 2;
    if (hi < lo) return bad;
    Word w = c.window(lo, hi + 2);
    for (std::int64_t j = lo; j <= hi; ++j)
      if (!lang.window_ok(w.data() + (j - lo))) bad.push_back(j);
    return bad;
  }
  const int q = lang.q(), o = lang.offset();
  const std::int64_t lo = lp ? c.origin() - o - q + 1 : c.origin() - o;
  const std::int64_t hi = rp ? c.end() - 1 - o : c.end() - o - q;
  if (hi < lo) return bad;
  Word w = c.window(lo + o, hi + o + q);
  std::vector<std::int64_t> cells;
  for (std::int64_t z = lo; z <= hi; ++z)
    if (!lang.window_ok(w.data() + (z - lo))) cells.push_back(z);
  for (std::int64_t b : cells) {
    if (bad.empty() || bad.back() < b - 1) bad.push_back(b - 1);
    if (bad.back() < b) bad.push_back(b);
  }
  return bad;
}

}  // namespace

std::optional<DefectInterval> locate_defect(const Configuration& config, const WindowLanguage& lang) {
  auto bad = bad_transitions(config, lang);
  if (bad.empty()) return std::nullopt;
  for (std::size_t x = 1; x < bad.size(); ++x)
    if (bad[x] != bad[x - 1] + 1) throw MultipleDefects();
  return DefectInterval{bad.front(), bad.back()};
}

std::optional<DefectInterval> locate_defect(const Configuration& config, const MarkovShift& shift) {
  return locate_defect(config, WindowLanguage::markov(shift));
}

std::string Verdict::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Particle: os << "Particle(" << value << ")"; break;
    case Kind::Blight: os << "Blight(" << value << ")"; break;
    case Kind::Vanished: os << "Vanished(" << value << ")"; break;
    case Kind::Split: os << "Split(" << value << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------- tracker

namespace {

void check_background(const BackgroundSpec& bg, const WindowLanguage& lang, const Alphabet& A) {
  auto* p = std::get_if<PeriodicBackground>(&bg);
  if (!p) return;
  const std::size_t n = p->word.size();
  const std::size_t span = static_cast<std::size_t>(lang.markov_mode() ? 2 : lang.q());
  Word ext;
  for (std::size_t i = 0; i < n + span; ++i) ext.push_back(p->word[i % n]);
  for (std::size_t i = 0; i < n; ++i)
    if (!lang.window_ok(ext.data() + i))
      throw Error("background " + A.format(p->word) + " is not admissible");
}

}  // namespace

DefectTracker::DefectTracker(LocalRule rule, WindowLanguage lang, Configuration config)
    : rule_(std::move(rule)), lang_(std::move(lang)), config_(std::move(config)) {
  if (lang_.alphabet_size() != rule_.alphabet().size())
    throw Error("rule and background use different alphabets");
  margin_ = 2 * rule_.radius() + 2 + lang_.q();
  check_background(config_.left(), lang_, rule_.alphabet());
  check_background(config_.right(), lang_, rule_.alphabet());
  if (config_.sampled(Side::Left) || config_.sampled(Side::Right))
    config_.materialize(config_.origin() - margin_, config_.end() + margin_);
  settle();
}

void DefectTracker::settle() {
  auto iv = locate_defect(config_, lang_);
  if (!iv) {
    current_.reset();
    return;
  }
  current_ = record_from_interval(config_, *iv, t_);
  const std::int64_t lo = current_->z - current_->L - margin_;
  const std::int64_t hi = current_->z + current_->R + 1 + margin_;
  config_.trim(lo, hi);
  if (config_.sampled(Side::Left) || config_.sampled(Side::Right)) config_.materialize(lo, hi);
}

std::optional<DefectRecord> DefectTracker::step() {
  config_ = apply(rule_, std::move(config_));
  ++t_;
  settle();
  return current_;
}

DefectTrajectory track(const LocalRule& rule, const WindowLanguage& lang, const Configuration& config,
                       std::int64_t T, std::int64_t width_cap) {
  DefectTracker tracker(rule, lang, config);
  if (!tracker.current()) throw Error("no defect in the initial configuration");
  DefectTrajectory out;
  out.records.push_back(*tracker.current());
  std::int64_t W = out.records.back().width();
  for (std::int64_t t = 1; t <= T; ++t) {
    std::optional<DefectRecord> rec;
    try {
      rec = tracker.step();
    } catch (const MultipleDefects&) {
      out.verdict = {Verdict::Kind::Split, t};
      return out;
    }
    if (!rec) {
      out.verdict = {Verdict::Kind::Vanished, t};
      return out;
    }
    out.records.push_back(*rec);
    if (rec->width() > width_cap) {
      out.verdict = {Verdict::Kind::Blight, t};
      return out;
    }
    W = std::max(W, rec->width());
  }
  out.verdict = {Verdict::Kind::Particle, W};
  return out;
}

VelocityBoundsCheck check_velocity_bounds(const DefectTrajectory& traj) {
  VelocityBoundsCheck c;
  for (std::size_t x = 1; x < traj.records.size(); ++x) {
    const auto& a = traj.records[x - 1];
    const auto& b = traj.records[x];
    ++c.pairs;
    if (!(a.z - a.raw_L - 1 <= b.z - b.raw_L && b.z + b.raw_R <= a.z + a.raw_R + 1)) ++c.violations_a;
    if (!(a.z - a.raw_L - 2 <= b.z && b.z <= a.z + a.raw_R + 1)) ++c.violations_b;
  }
  return c;
}

DefectRecord pad_to_constant_width(const DefectRecord& record, const Configuration& config,
                                   std::int64_t L, std::int64_t R) {
  if (L < record.raw_L || R < record.raw_R) throw Error("padding must not shrink the defect");
  DefectRecord out = record;
  out.L = L;
  out.R = R;
  out.d = config.window(record.z - L, record.z + R + 1);
  return out;
}

// ---------------------------------------------------------------- automaton

void DefectAutomaton::record(const AutomatonInput& in, const AutomatonOutput& out) {
  auto [it, fresh] = table_.emplace(in, out);
  if (!fresh && !(it->second == out))
    throw NotAFunction("defect automaton is not a function (widthCap or padding too small)");
}

std::optional<AutomatonOutput> DefectAutomaton::lookup(const AutomatonInput& in) const {
  auto it = table_.find(in);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

AutomatonInput DefectAutomaton::input_of(const Configuration& config, const DefectRecord& raw) const {
  const std::int64_t a = raw.z - L_, b = raw.z + R_;
  return {config.window(a - left_len_, a), config.window(a, b + 1), config.window(b + 1, b + 1 + right_len_)};
}

DefectAutomaton extract_automaton(const LocalRule& rule, const WindowLanguage& lang,
                                  const std::vector<Configuration>& seeds, std::int64_t T,
                                  std::int64_t width_cap) {
  std::int64_t L = -1, R = 0;
  for (const auto& seed : seeds) {
    auto traj = track(rule, lang, seed, T, width_cap);
    if (traj.verdict.kind != Verdict::Kind::Particle)
      throw Error("seed is not a particle: " + traj.verdict.str());
    for (const auto& r : traj.records) {
      L = std::max(L, r.raw_L);
      R = std::max(R, r.raw_R);
    }
  }
  const int s = lang.q() + 1;
  DefectAutomaton aut(L, R, static_cast<int>(L) + 2 + s, static_cast<int>(R) + 1 + s);
  for (const auto& seed : seeds) {
    DefectTracker tr(rule, lang, seed);
    for (std::int64_t t = 0; t < T; ++t) {
      const DefectRecord cur = *tr.current();
      AutomatonInput in = aut.input_of(tr.config(), cur);
      auto next = tr.step();
      if (!next) throw Error("seed vanished during extraction");
      AutomatonOutput out{pad_to_constant_width(*next, tr.config(), L, R).d,
                          static_cast<int>(next->z - cur.z)};
      aut.record(in, out);
    }
  }
  return aut;
}

Word fused_word(const Configuration& config, const DefectRecord& raw, const WindowLanguage& lang) {
  const std::int64_t i = raw.z - raw.raw_L - 1;
  const std::int64_t k = raw.z + raw.raw_R;
  if (lang.markov_mode()) return config.window(i, k + 2);
  return config.window(i + 1 + lang.offset(), k + lang.offset() + lang.q());
}

}  // namespace defectkin
