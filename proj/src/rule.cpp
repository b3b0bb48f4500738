#include "defectkin/rule.hpp"

#include "defectkin/errors.hpp"

namespace defectkin {

LocalRule::LocalRule(Alphabet alphabet, int radius, std::vector<Symbol> table)
    : alphabet_(std::move(alphabet)), r_(radius), n_(alphabet_.size()), table_(std::move(table)) {
  if (r_ < 0) throw Error("rule radius must be nonnegative");
  std::size_t expect = 1;
  for (int i = 0; i < 2 * r_ + 1; ++i) {
    expect *= n_;
    if (expect > (std::size_t{1} << 28)) throw Error("rule table too large");
  }
  if (table_.size() != expect) throw Error("rule table is not total");
  for (Symbol s : table_)
    if (s >= n_) throw Error("rule table entry outside alphabet");
}

LocalRule LocalRule::wolfram(int number) {
  if (number < 0 || number > 255) throw Error("Wolfram number must be in [0,255]");
  std::vector<Symbol> t(8);
  for (int i = 0; i < 8; ++i) t[i] = static_cast<Symbol>((number >> i) & 1);
  return LocalRule(Alphabet({"0", "1"}), 1, std::move(t));
}

LocalRule LocalRule::linear(const LinearRuleSpec& s) {
  if (s.n < 1) throw Error("linear rule modulus must be positive");
  auto m = [&](long v) { return static_cast<Symbol>(((v % s.n) + s.n) % s.n); };
  return from_function(Alphabet::numeric(static_cast<std::size_t>(s.n)), 1, [&](const Word& x) {
    return m(static_cast<long>(s.left) * x[0] + static_cast<long>(s.mid) * x[1] +
             static_cast<long>(s.right) * x[2]);
  });
}

LocalRule LocalRule::from_function(Alphabet alphabet, int radius,
                                   const std::function<Symbol(const Word&)>& f) {
  const std::size_t n = alphabet.size();
  const int w = 2 * radius + 1;
  std::size_t total = 1;
  for (int i = 0; i < w; ++i) total *= n;
  std::vector<Symbol> table(total);
  Word nb(w);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t v = idx;
    for (int i = w - 1; i >= 0; --i) {
      nb[i] = static_cast<Symbol>(v % n);
      v /= n;
    }
    table[idx] = f(nb);
  }
  return LocalRule(std::move(alphabet), radius, std::move(table));
}

Word LocalRule::apply(const Word& w) const {
  Word out;
  const std::size_t k = static_cast<std::size_t>(2 * r_);
  if (w.size() <= k) return out;
  out.reserve(w.size() - k);
  for (std::size_t i = 0; i + k < w.size(); ++i) out.push_back((*this)(w.data() + i));
  return out;
}

Word LocalRule::apply_cyclic(const Word& w) const {
  const std::size_t n = w.size();
  Word ext;
  ext.reserve(n + 2 * r_);
  for (int i = -r_; i < static_cast<int>(n) + r_; ++i)
    ext.push_back(w[static_cast<std::size_t>(floor_mod(i, static_cast<std::int64_t>(n)))]);
  return apply(ext);
}

}  // namespace defectkin
