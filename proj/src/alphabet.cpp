#include "defectkin/alphabet.hpp"

#include <algorithm>
#include <set>

#include "defectkin/errors.hpp"

namespace defectkin {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error("alphabet must have at least one symbol");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw Error("alphabet label must be nonempty");
    if (!seen.insert(l).second) throw Error("duplicate alphabet label '" + l + "'");
    if (l.size() != 1) single_char_ = false;
  }
}

Alphabet Alphabet::numeric(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

const std::string& Alphabet::label(Symbol s) const {
  if (s >= labels_.size()) throw Error("symbol index out of range");
  return labels_[s];
}

Symbol Alphabet::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error("unknown symbol '" + std::string(label) + "'");
  return static_cast<Symbol>(it - labels_.begin());
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  if (single_char_) {
    for (Symbol s : w) out += label(s);
    return out;
  }
  out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ",";
    out += label(w[i]);
  }
  return out + "]";
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  if (single_char_) {
    for (char c : text) w.push_back(index_of(std::string_view(&c, 1)));
    return w;
  }
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw Error("multi-character alphabet words must be written as [a,b,...]");
  text = text.substr(1, text.size() - 2);
  while (!text.empty()) {
    auto comma = text.find(',');
    w.push_back(index_of(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return w;
}

std::size_t minimal_period(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = 0; i + p < n && ok; ++i) ok = w[i] == w[i + p];
    if (ok) return p;
  }
  return n;
}

Word least_rotation(const Word& w) {
  Word best = w;
  Word r = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(r.begin(), r.begin() + 1, r.end());
    if (r < best) best = r;
  }
  return best;
}

}  // namespace defectkin
