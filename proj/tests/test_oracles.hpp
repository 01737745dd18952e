#pragma once
// Independent brute-force oracles used only by the tests. These deliberately
// avoid the library's computation paths: means come from enumerating all 2^n
// deletion masks, nothing is shared with the closed-form routes under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "tracekit/bitstring.hpp"

namespace oracle {

// Exact padded output means of the deletion channel (optionally followed by
// a substitution stage) by full enumeration of deletion masks.
inline std::vector<double> deletion_means_by_masks(const tracekit::BitString& x, double q,
                                                   double lambda = 0.0) {
  const std::size_t n = x.size();
  const double p = 1.0 - q;
  std::vector<double> means(n, 0.0);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double prob = 1.0;
    std::vector<std::uint8_t> out(n, 0);
    std::size_t len = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1ull << k)) {
        prob *= p;
        out[len++] = x[k];
      } else {
        prob *= q;
      }
    }
    for (std::size_t j = 0; j < len; ++j)
      means[j] += prob * (lambda + (1.0 - 2.0 * lambda) * static_cast<double>(out[j]));
  }
  return means;
}

// P(output length > j) by the same enumeration.
inline double survival_by_masks(std::size_t n, double q, std::size_t j) {
  const double p = 1.0 - q;
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double prob = 1.0;
    std::size_t len = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1ull << k)) {
        prob *= p;
        ++len;
      } else {
        prob *= q;
      }
    }
    if (len > j) acc += prob;
  }
  return acc;
}

// Is `t` a subsequence of `x`? (order-exactness of the deletion stage)
inline bool is_subsequence(const std::vector<std::uint8_t>& t, const tracekit::BitString& x) {
  std::size_t i = 0;
  for (std::size_t k = 0; k < x.size() && i < t.size(); ++k)
    if (x[k] == t[i]) ++i;
  return i == t.size();
}

// chi-square statistic for observed counts vs expected probabilities
inline double chi_square(const std::vector<long long>& observed, const std::vector<double>& probs,
                         long long total) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expect = probs[i] * static_cast<double>(total);
    const double d = static_cast<double>(observed[i]) - expect;
    stat += d * d / expect;
  }
  return stat;
}

// upper 1% critical values of the chi-square distribution by dof
inline double chi_square_crit_1pct(int dof) {
  switch (dof) {
    case 8: return 20.0902;
    case 9: return 21.6660;
    case 10: return 23.2093;
    case 11: return 24.7250;
    case 12: return 26.2170;
    default: return -1.0;
  }
}

}  // namespace oracle
