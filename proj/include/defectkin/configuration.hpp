#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>

#include "defectkin/measure.hpp"

namespace defectkin {

enum class Side { Left, Right };

// Cell z reads word[(z - anchor) mod p].
struct PeriodicBackground {
  Word word;
  std::int64_t anchor = 0;

  Symbol at(std::int64_t z) const {
    return word[static_cast<std::size_t>(floor_mod(z - anchor, static_cast<std::int64_t>(word.size())))];
  }
};

// Lazily drawn half-infinite background. Leftward streams draw with the
// backward kernel, rightward streams with the forward kernel, each
// conditioned on the adjacent core cell; the first draw uses mu0.
class SampledStream {
 public:
  SampledStream(std::shared_ptr<const MarkovMeasure> measure, Side side, std::uint64_t seed);

  Symbol draw(Symbol neighbor);
  Side side() const { return side_; }
  const std::vector<Symbol>& memo() const { return memo_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::shared_ptr<const MarkovMeasure> measure_;
  Side side_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<Symbol> memo_;
  std::vector<double> scratch_;
};

using BackgroundSpec = std::variant<PeriodicBackground, SampledStream>;

// Left background on cells < origin, core on [origin, origin+|core|),
// right background beyond.
class Configuration {
 public:
  Configuration(BackgroundSpec left, Word core, std::int64_t origin, BackgroundSpec right);

  // Left period ends at origin-1, right period starts at the core end.
  static Configuration periodic(const Word& left_period, const Word& core,
                                const Word& right_period, std::int64_t origin = 0);

  std::int64_t origin() const { return origin_; }
  std::int64_t end() const { return origin_ + static_cast<std::int64_t>(core_.size()); }
  const Word& core() const { return core_; }
  const BackgroundSpec& left() const { return left_; }
  const BackgroundSpec& right() const { return right_; }
  BackgroundSpec& background(Side s) { return s == Side::Left ? left_ : right_; }
  bool sampled(Side s) const {
    return std::holds_alternative<SampledStream>(s == Side::Left ? left_ : right_);
  }

  // Throws for sampled cells that were never drawn.
  Symbol at(std::int64_t z) const;
  // Cells [lo, hi).
  Word window(std::int64_t lo, std::int64_t hi) const;

  // Extend the core to cover [lo, hi), reading periodic backgrounds or
  // drawing sampled ones.
  void materialize(std::int64_t lo, std::int64_t hi);
  // Shrink the core towards [lo, hi). Periodic sides only drop cells
  // equal to the background; sampled sides are cut hard.
  void trim(std::int64_t lo, std::int64_t hi);

  Configuration shifted(std::int64_t k) const;

  void set_core(Word core, std::int64_t origin) {
    core_ = std::move(core);
    origin_ = origin;
  }
  void set_backgrounds(BackgroundSpec left, BackgroundSpec right) {
    left_ = std::move(left);
    right_ = std::move(right);
  }

 private:
  BackgroundSpec left_;
  Word core_;
  std::int64_t origin_;
  BackgroundSpec right_;
};

}  // namespace defectkin
