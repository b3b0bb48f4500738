#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "defectkin/alphabet.hpp"

namespace defectkin {

using Edge = std::pair<Symbol, Symbol>;

// Bi-infinite paths in a digraph on the alphabet. Vertices that cannot
// occur in a bi-infinite path are pruned at construction and reported
// as unusable; they keep their alphabet index.
class MarkovShift {
 public:
  MarkovShift(Alphabet alphabet, const std::vector<Edge>& edges);

  // Edges read off the cyclic words (each word taken periodically).
  static MarkovShift from_cycles(Alphabet alphabet, const std::vector<Word>& cycles);
  static MarkovShift full(Alphabet alphabet);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  bool has_edge(Symbol a, Symbol b) const { return adj_[a * n_ + b] != 0; }
  bool usable(Symbol a) const { return usable_[a] != 0; }
  const std::vector<Symbol>& vertices() const { return vertices_; }
  const std::vector<Symbol>& followers(Symbol a) const { return out_[a]; }
  const std::vector<Symbol>& predecessors(Symbol b) const { return in_[b]; }
  std::vector<Edge> edges() const;
  std::size_t edge_count() const { return edge_count_; }

  // Same alphabet, only the listed vertices kept (edges among them).
  MarkovShift restricted_to(const std::vector<Symbol>& keep) const;

  bool operator==(const MarkovShift& o) const {
    return alphabet_ == o.alphabet_ && adj_ == o.adj_;
  }

 private:
  Alphabet alphabet_;
  std::size_t n_ = 0;
  std::vector<unsigned char> adj_;
  std::vector<unsigned char> usable_;
  std::vector<Symbol> vertices_;
  std::vector<std::vector<Symbol>> out_, in_;
  std::size_t edge_count_ = 0;
};

bool is_admissible(const MarkovShift& shift, const Word& w);
// Admissible including the wrap-around edge.
bool is_cyclically_admissible(const MarkovShift& shift, const Word& w);

// Subshift of finite type given by its admissible q-words, pruned to
// essential blocks.
class SFT {
 public:
  SFT(Alphabet alphabet, int q, std::set<Word> admissible);

  // All cyclic q-windows of the given periodic words.
  static SFT from_periodic(Alphabet alphabet, const std::vector<Word>& words, int q);

  const Alphabet& alphabet() const { return alphabet_; }
  int radius() const { return q_; }
  const std::set<Word>& admissible() const { return words_; }
  bool contains(const Word& w) const { return words_.count(w) != 0; }

 private:
  Alphabet alphabet_;
  int q_;
  std::set<Word> words_;
};

enum class CoderKind { Block, Power };

class BlockCoder {
 public:
  BlockCoder(CoderKind kind, Alphabet source, std::vector<Word> blocks);

  CoderKind kind() const { return kind_; }
  int length() const { return p_; }
  const Alphabet& source() const { return source_; }
  const Alphabet& target() const { return target_; }
  const Word& block(Symbol s) const { return blocks_.at(s); }
  std::optional<Symbol> symbol_of(const Word& block) const;

  // Block: one target symbol per P-window, length n-P+1.
  // Power: the word is cut into consecutive P-blocks starting at `phase`;
  // leftover letters at either end are dropped.
  Word encode(const Word& w, std::size_t phase = 0) const;
  // Inverse of encode on the covered letters; throws if overlapping
  // blocks disagree.
  Word decode(const Word& code) const;

 private:
  CoderKind kind_;
  int p_;
  Alphabet source_;
  Alphabet target_;
  std::vector<Word> blocks_;
  std::map<Word, Symbol> index_;
};

struct Recoded {
  MarkovShift shift;
  BlockCoder coder;
};

Recoded sft_to_markov(const SFT& sft);
Recoded higher_block(const MarkovShift& shift, int P);
Recoded higher_power(const MarkovShift& shift, int W);

struct RegularityReport {
  bool left_regular = false;
  std::optional<int> P_S;
  bool right_regular = false;
  std::optional<int> F_S;
};

RegularityReport regularity(const MarkovShift& shift);

// Strongly connected components over usable vertices, each sorted,
// ordered by least vertex. Includes trivial components.
std::vector<std::vector<Symbol>> strongly_connected_components(const MarkovShift& shift);

// Combinatorial: every strongly connected piece is a single cycle.
bool is_union_of_cycles(const MarkovShift& shift);

// Numeric spectral radius of the whole adjacency matrix by power
// iteration on A+I (no combinatorial shortcut).
double spectral_radius(const MarkovShift& shift);

// Bits per symbol; exactly 0 when the digraph is a union of cycles.
double entropy(const MarkovShift& shift);

std::optional<Symbol> choice_point(const MarkovShift& shift);

struct CyclePair {
  int P;
  Word c0;
  Word c1;
};

CyclePair equal_length_cycles(const MarkovShift& shift);

std::vector<MarkovShift> transitive_components(const MarkovShift& shift);

std::optional<int> period_of(const MarkovShift& shift);

// Perron data for an irreducible shift: eigenvalue, right and left
// eigenvectors (indexed by alphabet, zero off the vertex set).
struct PerronData {
  double lambda;
  std::vector<double> right;
  std::vector<double> left;
};

PerronData perron(const MarkovShift& shift);

}  // namespace defectkin
