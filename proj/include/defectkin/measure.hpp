#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "defectkin/rule.hpp"
#include "defectkin/subshift.hpp"

namespace defectkin {

// Stationary or not, a Markov measure over the alphabet of a shift.
struct MarkovMeasure {
  std::vector<double> initial;              // mu0
  std::vector<std::vector<double>> kernel;  // tau(a, b)

  std::size_t size() const { return initial.size(); }
  // Reverse-time kernel tau_bar(b, a) = mu0(a) tau(a, b) / mu0(b).
  double backward(Symbol b, Symbol a) const;
  double cylinder(const Word& w) const;
  // max |(mu0 tau)_b - mu0_b|
  double stationarity_residual() const;
};

MarkovMeasure parry_measure(const MarkovShift& shift);

// Measure of Phi^{-1}[w] under the product-structured measure `mu`.
double pushforward_cylinder(const LocalRule& rule, const MarkovMeasure& mu, const Word& w);

// splitmix64 of (master, index); stream-split seeding.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

using Rng = std::mt19937_64;

// Unbiased index in [0, n) by rejection; platform independent.
std::size_t uniform_index(Rng& rng, std::size_t n);
// Draw from a probability vector (zero entries never drawn).
Symbol sample_from(Rng& rng, const std::vector<double>& p);

}  // namespace defectkin
