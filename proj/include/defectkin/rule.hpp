#pragma once

#include <functional>

#include "defectkin/alphabet.hpp"

namespace defectkin {

struct LinearRuleSpec {
  int n;
  int left, mid, right;
};

// Total local rule phi: A^(2r+1) -> A. The neighborhood (x_-r..x_r) is
// indexed base |A| with x_-r most significant, so for binary radius-1
// rules the index is 4a+2b+c.
class LocalRule {
 public:
  LocalRule(Alphabet alphabet, int radius, std::vector<Symbol> table);

  static LocalRule wolfram(int number);
  static LocalRule linear(const LinearRuleSpec& spec);
  static LocalRule from_function(Alphabet alphabet, int radius,
                                 const std::function<Symbol(const Word&)>& f);

  const Alphabet& alphabet() const { return alphabet_; }
  int radius() const { return r_; }
  int width() const { return 2 * r_ + 1; }
  const std::vector<Symbol>& table() const { return table_; }

  Symbol operator()(const Symbol* nb) const { return table_[index(nb)]; }
  Symbol operator()(const Word& nb) const { return (*this)(nb.data()); }
  Symbol at3(Symbol a, Symbol b, Symbol c) const {
    return table_[(a * n_ + b) * n_ + c];
  }
  std::size_t index(const Symbol* nb) const {
    std::size_t idx = 0;
    for (int i = 0; i < 2 * r_ + 1; ++i) idx = idx * n_ + nb[i];
    return idx;
  }

  // Image of a finite word: length n - 2r.
  Word apply(const Word& w) const;
  // Image of the periodic extension, one period.
  Word apply_cyclic(const Word& w) const;

 private:
  Alphabet alphabet_;
  int r_;
  std::size_t n_;
  std::vector<Symbol> table_;
};

}  // namespace defectkin
