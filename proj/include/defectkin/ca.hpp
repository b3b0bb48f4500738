#pragma once

#include "defectkin/configuration.hpp"
#include "defectkin/rule.hpp"
#include "defectkin/subshift.hpp"

namespace defectkin {

// One step of the global map. Periodic backgrounds are replaced by
// their image (same anchor) and the core grows by r per side; sampled
// backgrounds feed r fresh cells per side and the core keeps its span.
Configuration apply(const LocalRule& rule, Configuration config);

// sigma^k: (sigma^k a)_z = a_{z+k}.
inline Configuration shift(const Configuration& config, std::int64_t k) { return config.shifted(k); }

bool check_invariance(const LocalRule& rule, const SFT& sft);

bool is_left_permutative(const LocalRule& rule, const std::vector<Symbol>& subalphabet);
bool is_right_permutative(const LocalRule& rule, const std::vector<Symbol>& subalphabet);

bool is_left_resolving(const LocalRule& rule, const MarkovShift& shift);
bool is_right_resolving(const LocalRule& rule, const MarkovShift& shift);
// A 4-word (a,b,c,d) on which resolving fails, if any.
std::optional<Word> left_resolving_witness(const LocalRule& rule, const MarkovShift& shift);
std::optional<Word> right_resolving_witness(const LocalRule& rule, const MarkovShift& shift);

// Primitive periodic words w, |w| <= maxPeriod, with
// Phi^p(w-bar) = sigma^{pv}(w-bar); one least rotation per sigma-orbit.
std::vector<Word> find_travelling_wave_backgrounds(const LocalRule& rule, int p, int v, int max_period);

// Rule on the coder's target alphabet. Block coders keep the radius;
// power coders use radius ceil(r/P). Inconsistent neighbourhoods and
// images outside the target alphabet map to symbol 0.
LocalRule recode_rule(const LocalRule& rule, const BlockCoder& coder);

// Sigma-components of a shift on the rule's alphabet grouped into
// Phi-orbits. Only periodic components are grouped; each group is the
// list of component indices into transitive_components(shift).
std::vector<std::vector<std::size_t>> phi_orbits_of_components(const LocalRule& rule,
                                                               const MarkovShift& shift);

// Every admissible q-word of the image of a rule-closed SFT has a
// preimage; used to check Phi(S) = S.
bool is_onto(const LocalRule& rule, const SFT& sft);

// The q-windows of length (q + 2r) all admissible.
std::vector<Word> admissible_extensions(const SFT& sft, int length);

// The cycle word of a periodic component, starting at its least vertex.
Word cycle_word(const MarkovShift& component);

}  // namespace defectkin
