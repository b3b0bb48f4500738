#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <unordered_set>

#include "defectkin/ca.hpp"

namespace defectkin {

// Admissibility of the background, read as a sequence of transitions.
// Markov mode (q <= 2): transition j is the letter pair (a_j, a_{j+1}).
// Window mode (q >= 3): the q-block presentation; block z is the window
// a[z+offset .. z+offset+q-1] and transition j joins blocks j and j+1,
// so it is bad iff block j or block j+1 is inadmissible.
class WindowLanguage {
 public:
  static WindowLanguage markov(const MarkovShift& shift);
  // Default offset is -floor(q/2). SFTs with q <= 2 use Markov mode.
  static WindowLanguage sft(const SFT& sft, std::optional<int> offset = std::nullopt);

  bool markov_mode() const { return markov_.has_value(); }
  int q() const { return q_; }
  int offset() const { return offset_; }
  // Length of a background code symbol: 1 letter in Markov mode, q otherwise.
  int block_length() const { return markov_mode() ? 1 : q_; }
  std::size_t alphabet_size() const { return n_; }

  // Markov mode: edge test; window mode: q-word test.
  bool window_ok(const Symbol* w) const;

  // The Markov shift in block space (letters in Markov mode).
  const MarkovShift& block_shift() const { return block_shift_; }
  // Coder from letters to block space (identity in Markov mode).
  const BlockCoder& coder() const { return coder_; }

 private:
  WindowLanguage(std::optional<MarkovShift> markov, int q, int offset, std::size_t n,
                 std::vector<Word> words, MarkovShift block_shift, BlockCoder coder);

  struct WordHash {
    std::size_t operator()(const Word& w) const noexcept;
  };

  std::optional<MarkovShift> markov_;
  int q_;
  int offset_;
  std::size_t n_;
  std::unordered_set<Word, WordHash> words_;
  MarkovShift block_shift_;
  BlockCoder coder_;
};

struct DefectInterval {
  std::int64_t i;
  std::int64_t k;
  std::int64_t width() const { return k - i; }
};

struct DefectRecord {
  std::int64_t t = 0;
  std::int64_t z = 0;
  std::int64_t L = 0;
  std::int64_t R = 0;
  Word d;  // configuration on [z-L .. z+R]
  std::int64_t raw_L = 0;
  std::int64_t raw_R = 0;
  std::int64_t width() const { return L + R + 1; }
};

// Centre and padding of the interval [i, k) of width w = k - i.
DefectRecord record_from_interval(const Configuration& config, const DefectInterval& iv, std::int64_t t);

// Unique maximal run of bad transitions, none if admissible. Throws
// MultipleDefects on separated runs.
std::optional<DefectInterval> locate_defect(const Configuration& config, const WindowLanguage& lang);
std::optional<DefectInterval> locate_defect(const Configuration& config, const MarkovShift& shift);

struct Verdict {
  enum class Kind { Particle, Blight, Vanished, Split };
  Kind kind;
  std::int64_t value;  // W for Particle, the step otherwise
  std::string str() const;
  bool operator==(const Verdict& o) const { return kind == o.kind && value == o.value; }
};

struct DefectTrajectory {
  std::vector<DefectRecord> records;
  Verdict verdict{Verdict::Kind::Particle, 0};
};

// Steps a single-defect configuration and keeps the core trimmed to a
// margin around the defect.
class DefectTracker {
 public:
  DefectTracker(LocalRule rule, WindowLanguage lang, Configuration config);

  const Configuration& config() const { return config_; }
  const std::optional<DefectRecord>& current() const { return current_; }
  std::int64_t time() const { return t_; }
  std::int64_t margin() const { return margin_; }
  const LocalRule& rule() const { return rule_; }
  const WindowLanguage& language() const { return lang_; }

  // Advance one step. Returns the record, or none if the defect vanished.
  // Throws MultipleDefects on a split.
  std::optional<DefectRecord> step();

 private:
  void settle();

  LocalRule rule_;
  WindowLanguage lang_;
  Configuration config_;
  std::optional<DefectRecord> current_;
  std::int64_t t_ = 0;
  std::int64_t margin_;
};

inline constexpr std::int64_t kDefaultWidthCap = 64;

DefectTrajectory track(const LocalRule& rule, const WindowLanguage& lang, const Configuration& config,
                       std::int64_t T, std::int64_t width_cap = kDefaultWidthCap);

// Bounds between consecutive records: (a) the new raw extent lies in the
// old one grown by one cell per side; (b) the new centre lies in
// [z - raw_L - 2, z + raw_R + 1].
struct VelocityBoundsCheck {
  std::size_t pairs = 0;
  std::size_t violations_a = 0;
  std::size_t violations_b = 0;
};
VelocityBoundsCheck check_velocity_bounds(const DefectTrajectory& traj);

DefectRecord pad_to_constant_width(const DefectRecord& record, const Configuration& config,
                                   std::int64_t L, std::int64_t R);

// Letters of the padded neighbourhood fed to the automaton.
struct AutomatonInput {
  Word left;   // a[z-L-len_l .. z-L-1]
  Word state;  // a[z-L .. z+R]
  Word right;  // a[z+R+1 .. z+R+len_r]
  auto operator<=>(const AutomatonInput&) const = default;
};

struct AutomatonOutput {
  Word state;
  int velocity;
  bool operator==(const AutomatonOutput&) const = default;
};

// Empirical (Upsilon, V) at constant padding (L, R). Inputs carry
// L+2+s letters on the left and R+1+s on the right, with slack s = q+1
// so that the next defect location is itself a function of the input.
class DefectAutomaton {
 public:
  DefectAutomaton(std::int64_t L, std::int64_t R, int left_len, int right_len)
      : L_(L), R_(R), left_len_(left_len), right_len_(right_len) {}

  std::int64_t L() const { return L_; }
  std::int64_t R() const { return R_; }
  std::int64_t W() const { return L_ + R_ + 1; }
  int left_len() const { return left_len_; }
  int right_len() const { return right_len_; }

  void record(const AutomatonInput& in, const AutomatonOutput& out);
  std::optional<AutomatonOutput> lookup(const AutomatonInput& in) const;
  const std::map<AutomatonInput, AutomatonOutput>& table() const { return table_; }

  AutomatonInput input_of(const Configuration& config, const DefectRecord& raw) const;

 private:
  std::int64_t L_, R_;
  int left_len_, right_len_;
  std::map<AutomatonInput, AutomatonOutput> table_;
};

// Seeds must all be Particles; padding is the max (L_t, R_t) over all.
DefectAutomaton extract_automaton(const LocalRule& rule, const WindowLanguage& lang,
                                  const std::vector<Configuration>& seeds, std::int64_t T,
                                  std::int64_t width_cap = kDefaultWidthCap);

// Fused block word: the letters covered by the bad windows of the
// defect (window mode), else the defect word itself.
Word fused_word(const Configuration& config, const DefectRecord& raw, const WindowLanguage& lang);

}  // namespace defectkin
