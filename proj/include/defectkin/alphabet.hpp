#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace defectkin {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels);

  // Labels "0".."n-1".
  static Alphabet numeric(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Symbol s) const;
  Symbol index_of(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }
  bool single_char() const { return single_char_; }

  // Strings of label characters when labels are single characters,
  // otherwise comma separated labels in brackets.
  std::string format(const Word& w) const;
  Word parse(std::string_view text) const;

  bool operator==(const Alphabet& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  bool single_char_ = true;
};

// Python-style modulus.
inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t m) {
  return (a - floor_mod(a, m)) / m;
}

// Smallest p dividing w.size() with w cyclically p-periodic.
std::size_t minimal_period(const Word& w);

// Lexicographically least rotation.
Word least_rotation(const Word& w);

}  // namespace defectkin
