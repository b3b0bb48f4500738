#include "defectkin/measure.hpp"

#include <cmath>
#include <numeric>

#include "defectkin/errors.hpp"

namespace defectkin {

double MarkovMeasure::backward(Symbol b, Symbol a) const {
  if (initial[b] <= 0.0) return 0.0;
  return initial[a] * kernel[a][b] / initial[b];
}

double MarkovMeasure::cylinder(const Word& w) const {
  if (w.empty()) return 1.0;
  double p = initial[w[0]];
  for (std::size_t i = 1; i < w.size(); ++i) p *= kernel[w[i - 1]][w[i]];
  return p;
}

double MarkovMeasure::stationarity_residual() const {
  double worst = 0.0;
  for (std::size_t b = 0; b < size(); ++b) {
    double s = 0.0;
    for (std::size_t a = 0; a < size(); ++a) s += initial[a] * kernel[a][b];
    worst = std::max(worst, std::abs(s - initial[b]));
  }
  return worst;
}

MarkovMeasure parry_measure(const MarkovShift& shift) {
  PerronData pd = perron(shift);
  const std::size_t n = shift.alphabet_size();
  MarkovMeasure m;
  m.initial.assign(n, 0.0);
  m.kernel.assign(n, std::vector<double>(n, 0.0));
  const double lam = pd.lambda;
  double z = 0.0;
  for (Symbol v : shift.vertices()) z += pd.left[v] * pd.right[v];
  for (Symbol v : shift.vertices()) m.initial[v] = pd.left[v] * pd.right[v] / z;
  auto reg = regularity(shift);
  for (Symbol a : shift.vertices()) {
    const auto& f = shift.followers(a);
    if (reg.right_regular) {
      // Exact uniform rows; avoids eigenvector round-off.
      for (Symbol b : f) m.kernel[a][b] = 1.0 / static_cast<double>(f.size());
      continue;
    }
    double row = 0.0;
    for (Symbol b : f) row += m.kernel[a][b] = pd.right[b] / (lam * pd.right[a]);
    for (Symbol b : f) m.kernel[a][b] /= row;
  }
  if (reg.left_regular && reg.right_regular) {
    for (Symbol v : shift.vertices())
      m.initial[v] = 1.0 / static_cast<double>(shift.vertices().size());
  }
  return m;
}

double pushforward_cylinder(const LocalRule& rule, const MarkovMeasure& mu, const Word& w) {
  const std::size_t n = rule.alphabet().size();
  const std::size_t len = w.size() + 2 * static_cast<std::size_t>(rule.radius());
  double total = 0.0;
  Word u(len, 0);
  // Depth-first over preimage words with nonzero measure, pruning on the
  // first mismatching image cell.
  auto rec = [&](auto&& self, std::size_t pos, double p) -> void {
    if (p == 0.0) return;
    if (pos >= static_cast<std::size_t>(rule.width())) {
      std::size_t k = pos - rule.width();
      if (rule(u.data() + k) != w[k]) return;
    }
    if (pos == len) {
      total += p;
      return;
    }
    for (Symbol s = 0; s < n; ++s) {
      u[pos] = s;
      double q = pos == 0 ? mu.initial[s] : p * mu.kernel[u[pos - 1]][s];
      self(self, pos + 1, q);
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw Error("uniform_index over empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

Symbol sample_from(Rng& rng, const std::vector<double>& p) {
  // Equal-mass supports are sampled exactly by index.
  std::vector<Symbol> support;
  double first = -1.0;
  bool uniform = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (first < 0.0) first = p[i];
    if (std::abs(p[i] - first) > 1e-15) uniform = false;
    support.push_back(static_cast<Symbol>(i));
  }
  if (support.empty()) throw Error("sampling from an empty distribution");
  if (uniform) return support[uniform_index(rng, support.size())];
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0, total = 0.0;
  for (Symbol s : support) total += p[s];
  for (Symbol s : support) {
    acc += p[s] / total;
    if (u < acc) return s;
  }
  return support.back();
}

}  // namespace defectkin
