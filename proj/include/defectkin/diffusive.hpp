#pragma once

#include <boost/rational.hpp>
#include <map>
#include <memory>
#include <string>

#include "defectkin/defect.hpp"
#include "defectkin/measure.hpp"

namespace defectkin {

using Rational = boost::rational<std::int64_t>;

// The two-layer example: symbol = bit + 2*dot, so "0","1" are the
// background letters (bit, open) and "2","3" the defect letters
// (bit, dot).
LocalRule diffuse_example_rule();
// Full shift on the open letters {0, 1}.
MarkovShift diffuse_example_background();

struct ResolvingSystemReport {
  struct Condition {
    bool ok = false;
    std::string witness;  // empty when ok
  };
  Condition markov_union;  // L, R and L u R Markov
  Condition left;          // left-regular, invariant, left-resolving
  Condition right;         // right-regular, invariant, right-resolving
  Condition parry;         // Parry measures exist
  int P_L = 0;
  int F_R = 0;
  std::shared_ptr<const MarkovMeasure> lambda;
  std::shared_ptr<const MarkovMeasure> rho;
  bool pass() const { return markov_union.ok && left.ok && right.ok && parry.ok; }
};

ResolvingSystemReport verify_resolving_system(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R);

// Union of the edge sets on the common alphabet.
MarkovShift union_shift(const MarkovShift& L, const MarkovShift& R);

// Words of length W whose W+1 transitions are all inadmissible next to
// any background letters: the support of the default initial defect law.
std::vector<Word> default_defect_words(const MarkovShift& L, const MarkovShift& R, int W);

// Exact kernel on X = L_2 x A^2 x R_2, states stored as the six cells
// (l2, l1, d0, d1, r1, r2) around the padded defect.
class WalkKernel {
 public:
  std::size_t size() const { return states_.size(); }
  const Word& state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> find(const Word& x) const;
  int velocity(std::size_t i) const { return velocity_[i]; }
  const std::vector<std::pair<std::size_t, Rational>>& row(std::size_t i) const { return rows_[i]; }
  // Law of xi_0 under lambda x delta x rho.
  const std::vector<double>& initial() const { return initial_; }
  int P_L() const { return P_L_; }
  int F_R() const { return F_R_; }

 private:
  friend WalkKernel build_walk_kernel(const LocalRule&, const MarkovShift&, const MarkovShift&, int,
                                      const std::vector<std::pair<Word, double>>&);
  std::size_t add(const Word& x);

  std::vector<Word> states_;
  std::map<Word, std::size_t> index_;
  std::vector<int> velocity_;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows_;
  std::vector<double> initial_;
  int P_L_ = 0, F_R_ = 0;
};

// Defects of width W <= 2 are padded on the right to two cells. An empty
// delta means uniform over default_defect_words.
WalkKernel build_walk_kernel(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W,
                             const std::vector<std::pair<Word, double>>& delta = {});

struct RecurrentClass {
  std::vector<std::size_t> states;
  std::vector<double> stationary;  // aligned with states
  double drift = 0.0;
};
std::vector<RecurrentClass> stationary_and_drift(const WalkKernel& kernel);

struct WalkOptions {
  std::int64_t steps = 1000;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::vector<std::pair<Word, double>> delta;
  std::int64_t stride = 1;  // record every stride-th position
};

struct WalkSample {
  std::vector<std::int64_t> z;
  std::vector<int> states;  // kernel indices, -1 when not tracked
  bool excluded = false;
  std::string reason;
};

struct WalkStatistics {
  std::size_t samples = 0;
  std::size_t excluded = 0;
  std::int64_t horizon = 0;
  double drift = 0.0;
  double variance_per_step = 0.0;
  std::vector<std::uint64_t> visits;  // per kernel state, excluding the last step
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> transitions;
};

struct WalkResult {
  std::vector<WalkSample> samples;
  WalkStatistics stats;
};

// CA simulation: lazily sampled backgrounds from the Parry measures, the
// initial defect from delta. The kernel (optional) indexes xi_t.
WalkResult sample_walks(const LocalRule& rule, const MarkovShift& L, const MarkovShift& R, int W,
                        const WalkKernel* kernel, const WalkOptions& options);

// Direct simulation of the kernel chain.
WalkResult sample_kernel_walks(const WalkKernel& kernel, const WalkOptions& options);

struct RowTest {
  std::size_t state;
  std::uint64_t visits;
  double tv;
  bool conclusive;
  bool pass;
};

struct MarkovTestReport {
  std::vector<RowTest> rows;
  double max_tv = 0.0;
  double weighted_tv = 0.0;  // visit-weighted mean over rows
  std::size_t inconclusive = 0;
  bool pass = true;
  // Order-1 check: rows conditioned on (xi_{t-1}, xi_t).
  double max_tv_order1 = 0.0;
  bool pass_order1 = true;
};

inline constexpr std::uint64_t kTvVisits = 100000;
inline constexpr double kTvTolerance = 0.01;
inline constexpr std::uint64_t kMinVisits = 100;

MarkovTestReport markov_property_test(const WalkResult& walks, const WalkKernel& kernel);

// One side is a finite set of Phi^p = sigma^q periodic points, each
// sample using one of them uniformly; the other side is sampled from its
// Parry measure. Positions are recorded every p steps.
WalkResult fixed_side_walk(const LocalRule& rule, Side fixed_side, const std::vector<Word>& fixed_points,
                          const MarkovShift& other, int p, int q, int W, WalkOptions options);

}  // namespace defectkin
