#include "defectkin/configuration.hpp"

#include "defectkin/errors.hpp"

namespace defectkin {

SampledStream::SampledStream(std::shared_ptr<const MarkovMeasure> measure, Side side, std::uint64_t seed)
    : measure_(std::move(measure)), side_(side), seed_(seed), rng_(seed) {
  if (!measure_) throw Error("sampled stream needs a measure");
}

Symbol SampledStream::draw(Symbol neighbor) {
  const MarkovMeasure& m = *measure_;
  if (memo_.empty()) {
    memo_.push_back(sample_from(rng_, m.initial));
    return memo_.back();
  }
  scratch_.assign(m.size(), 0.0);
  if (neighbor >= m.size()) throw Error("stream neighbor outside measure alphabet");
  for (std::size_t a = 0; a < m.size(); ++a)
    scratch_[a] = side_ == Side::Left ? m.backward(neighbor, static_cast<Symbol>(a))
                                      : m.kernel[neighbor][a];
  memo_.push_back(sample_from(rng_, scratch_));
  return memo_.back();
}

Configuration::Configuration(BackgroundSpec left, Word core, std::int64_t origin, BackgroundSpec right)
    : left_(std::move(left)), core_(std::move(core)), origin_(origin), right_(std::move(right)) {
  for (const auto* bg : {&left_, &right_})
    if (auto* p = std::get_if<PeriodicBackground>(bg); p && p->word.empty())
      throw Error("periodic background word is empty");
}

Configuration Configuration::periodic(const Word& left_period, const Word& core,
                                      const Word& right_period, std::int64_t origin) {
  const auto lp = static_cast<std::int64_t>(left_period.size());
  return Configuration(PeriodicBackground{left_period, origin - lp}, core, origin,
                       PeriodicBackground{right_period, origin + static_cast<std::int64_t>(core.size())});
}

Symbol Configuration::at(std::int64_t z) const {
  if (z >= origin_ && z < end()) return core_[static_cast<std::size_t>(z - origin_)];
  const BackgroundSpec& bg = z < origin_ ? left_ : right_;
  if (auto* p = std::get_if<PeriodicBackground>(&bg)) return p->at(z);
  throw Error("cell outside the materialized window of a sampled background");
}

Word Configuration::window(std::int64_t lo, std::int64_t hi) const {
  Word w;
  if (hi > lo) w.reserve(static_cast<std::size_t>(hi - lo));
  for (std::int64_t z = lo; z < hi; ++z) w.push_back(at(z));
  return w;
}

void Configuration::materialize(std::int64_t lo, std::int64_t hi) {
  if (lo < origin_) {
    Word front;
    front.reserve(static_cast<std::size_t>(origin_ - lo));
    if (auto* p = std::get_if<PeriodicBackground>(&left_)) {
      for (std::int64_t z = lo; z < origin_; ++z) front.push_back(p->at(z));
    } else {
      auto& s = std::get<SampledStream>(left_);
      // Draw outward, each cell conditioned on its right neighbour.
      front.assign(static_cast<std::size_t>(origin_ - lo), 0);
      Symbol nb = core_.empty() ? 0 : core_.front();
      for (std::size_t k = front.size(); k-- > 0;) nb = front[k] = s.draw(nb);
    }
    core_.insert(core_.begin(), front.begin(), front.end());
    origin_ = lo;
  }
  if (hi > end()) {
    const std::int64_t e = end();
    if (auto* p = std::get_if<PeriodicBackground>(&right_)) {
      for (std::int64_t z = e; z < hi; ++z) core_.push_back(p->at(z));
    } else {
      auto& s = std::get<SampledStream>(right_);
      Symbol nb = core_.empty() ? 0 : core_.back();
      for (std::int64_t z = e; z < hi; ++z) {
        nb = s.draw(nb);
        core_.push_back(nb);
      }
    }
  }
}

void Configuration::trim(std::int64_t lo, std::int64_t hi) {
  std::size_t drop_front = 0;
  if (auto* p = std::get_if<PeriodicBackground>(&left_)) {
    while (drop_front < core_.size() && origin_ + static_cast<std::int64_t>(drop_front) < lo &&
           core_[drop_front] == p->at(origin_ + static_cast<std::int64_t>(drop_front)))
      ++drop_front;
  } else if (lo > origin_) {
    drop_front = static_cast<std::size_t>(std::min<std::int64_t>(lo - origin_, static_cast<std::int64_t>(core_.size())));
  }
  core_.erase(core_.begin(), core_.begin() + static_cast<std::ptrdiff_t>(drop_front));
  origin_ += static_cast<std::int64_t>(drop_front);
  if (auto* p = std::get_if<PeriodicBackground>(&right_)) {
    while (!core_.empty() && end() - 1 >= hi && core_.back() == p->at(end() - 1)) core_.pop_back();
  } else {
    while (!core_.empty() && end() > hi) core_.pop_back();
  }
}

Configuration Configuration::shifted(std::int64_t k) const {
  Configuration c = *this;
  c.origin_ -= k;
  for (auto* bg : {&c.left_, &c.right_})
    if (auto* p = std::get_if<PeriodicBackground>(bg)) p->anchor -= k;
  return c;
}

}  // namespace defectkin
