#pragma once

#include <map>
#include <string>

#include "defectkin/defect.hpp"

namespace defectkin {

// Code for one (sigma, Phi)-orbit of sigma-periodic components. A symbol
// is a phase of one component word and stands for the half-infinite
// background whose block at the boundary reads word[phase .. phase+P-1].
// shift_perm is the shift action, rule_perm the rule action at a fixed
// position.
class PeriodicCode {
 public:
  struct Entry {
    std::size_t word;
    std::size_t phase;
  };

  PeriodicCode(const LocalRule& rule, std::vector<Word> orbit, int block_length);

  const std::vector<Word>& words() const { return words_; }
  int block_length() const { return block_length_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t s) const { return entries_[s]; }
  std::size_t index_of(std::size_t word, std::int64_t phase) const;
  const std::vector<std::size_t>& shift_perm() const { return shift_; }
  const std::vector<std::size_t>& rule_perm() const { return rule_; }
  // shift^v after rule, as in the kinematic update.
  std::size_t advance(std::size_t s, std::int64_t v) const;
  // Block of P letters presenting symbol s.
  Word block(std::size_t s) const;
  int spatial_period() const { return spatial_; }
  int temporal_period() const { return temporal_; }

 private:
  std::vector<Word> words_;
  int block_length_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> shift_, rule_;
  std::vector<std::size_t> rule_word_;
  std::vector<std::size_t> rule_off_;
  int spatial_ = 1, temporal_ = 1;
};

// Groups of primitive component words (least rotations), one group per
// Phi-orbit. Throws if a component of the background is not a cycle.
std::vector<std::vector<Word>> periodic_orbits(const LocalRule& rule, const WindowLanguage& lang);

// Code of a single periodic Markov component (letters as symbols).
PeriodicCode build_periodic_code(const MarkovShift& component, const LocalRule& rule);

struct CodeRef {
  std::size_t group;
  std::size_t symbol;
  auto operator<=>(const CodeRef&) const = default;
};

struct KState {
  CodeRef l;
  Word d;
  CodeRef r;
  auto operator<=>(const KState&) const = default;
};

// The finite system (X, xi, V) for one pair of background orbits.
// Update values come from the defect automaton; entries missing from
// it are filled by simulating the realized configuration one step.
class KinematicSystem {
 public:
  KinematicSystem(LocalRule rule, WindowLanguage lang, std::vector<PeriodicCode> codes,
                  DefectAutomaton automaton);

  const std::vector<PeriodicCode>& codes() const { return codes_; }
  const DefectAutomaton& automaton() const { return automaton_; }
  const LocalRule& rule() const { return rule_; }
  const WindowLanguage& language() const { return lang_; }

  // The configuration with the state's centre at z.
  Configuration realize(const KState& x, std::int64_t z = 0) const;
  // State of a tracked configuration; throws if a side is not a
  // periodic background of a known component.
  KState state_of(const Configuration& config, const DefectRecord& raw) const;

  std::size_t add(const KState& x);
  // Evaluates xi on every state, adding images until closed.
  void close();

  std::size_t size() const { return states_.size(); }
  const KState& state(std::size_t i) const { return states_[i]; }
  std::size_t next(std::size_t i) const { return next_.at(i); }
  int velocity(std::size_t i) const { return velocity_.at(i); }
  std::optional<std::size_t> find(const KState& x) const;

 private:
  std::pair<KState, int> evaluate(const KState& x);
  CodeRef code_of(const PeriodicBackground& bg, std::int64_t block_start) const;

  LocalRule rule_;
  WindowLanguage lang_;
  std::vector<PeriodicCode> codes_;
  DefectAutomaton automaton_;
  std::vector<KState> states_;
  std::map<KState, std::size_t> index_;
  std::vector<std::size_t> next_;
  std::vector<int> velocity_;
};

struct ParticleType {
  std::vector<std::size_t> orbit;  // state indices, xi-ordered
  std::vector<int> velocities;
  int period() const { return static_cast<int>(orbit.size()); }
  int displacement() const;
  double average_velocity() const { return static_cast<double>(displacement()) / period(); }
};

struct Transient {
  std::size_t state;
  std::size_t type;  // index of the type it falls into
  int depth;
};

std::vector<ParticleType> enumerate_particle_types(const KinematicSystem& system);
std::vector<Transient> transients(const KinematicSystem& system, const std::vector<ParticleType>& types);

// z_0 .. z_T integrating V along the orbit from the given phase.
std::vector<std::int64_t> predict_trajectory(const ParticleType& type, std::size_t phase, std::int64_t z0,
                                             std::int64_t T);

// Direct simulation for P steps from every phase returns the same state
// displaced by the orbit's total velocity.
bool verify_conjugacy(const KinematicSystem& system, const ParticleType& type);

// Raw defect presentation of a state.
struct Presentation {
  Word fused;
  Word left;  // P letters left of the raw defect
  Word d;     // raw defect word
  Word right;
  int velocity;
};
Presentation present(const KinematicSystem& system, std::size_t state);

struct TypeReport {
  Word left_component;
  Word right_component;
  int period;
  int displacement;
  std::vector<Presentation> members;
  std::size_t system;
  std::size_t type;
};

struct ClassifyOptions {
  std::int64_t steps = 64;
  std::int64_t width_cap = kDefaultWidthCap;
};

struct Classification {
  std::vector<KinematicSystem> systems;
  std::vector<std::vector<ParticleType>> types;  // per system
  std::vector<std::vector<Transient>> transients;
  std::vector<TypeReport> reports;
  std::size_t seeds = 0;
  std::size_t particle_seeds = 0;
  std::map<std::string, std::size_t> verdict_counts;
};

// Seeds: one periodic component on each side at every phase, with every
// middle word up to max_middle letters; only single-defect seeds kept.
std::vector<Configuration> enumerate_seeds(const LocalRule& rule, const WindowLanguage& lang, int max_middle);

Classification classify(const LocalRule& rule, const WindowLanguage& lang,
                        const std::vector<Configuration>& seeds, const ClassifyOptions& options = {});

}  // namespace defectkin
