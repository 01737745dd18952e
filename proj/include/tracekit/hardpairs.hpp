#pragma once
// Indistinguishable string pairs built from {-1,0,1}-coefficient polynomials
// that are small on [0,1]: coefficient search, the phi/psi split into two bit
// strings with zero padding, exact per-bit mean gaps, and total-variation
// bounds for T-sample single-bit tests.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tracekit/analytic.hpp"
#include "tracekit/bitstring.hpp"
#include "tracekit/meanstats.hpp"
#include "tracekit/rng.hpp"

namespace tracekit {

// A signed-coefficient polynomial Q with its certified sup on [0,1]: the grid
// maximum plus a local refinement, so sup01 >= true sup - deg^2 * spacing.
struct LittlewoodPoly {
  SignedSeq coeffs;  // length degree+1
  double sup01 = 0.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

enum class SearchMode { exhaustive, anneal };

namespace detail {

// Chebyshev-Lobatto points on [0,1], z_0 = 1 down to z_{N-1} = 0.
inline std::vector<double> chebyshev_grid01(int degree) {
  const std::size_t N = std::max<std::size_t>(2, 64 * static_cast<std::size_t>(degree) + 1);
  std::vector<double> zs(N);
  for (std::size_t i = 0; i < N; ++i)
    zs[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(N - 1)));
  return zs;
}

// visit order striding across the grid so large values are met early
inline std::vector<std::size_t> strided_order(std::size_t N) {
  std::size_t stride = 47;
  while (std::gcd(stride, N) != 1) stride += 2;
  std::vector<std::size_t> order(N);
  std::size_t pos = 0;
  for (std::size_t t = 0; t < N; ++t) {
    order[t] = pos;
    pos = (pos + stride) % N;
  }
  return order;
}

inline double abs_horner(const std::vector<std::int8_t>& c, double z) {
  double acc = c[c.size() - 1];
  for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * z + c[i];
  return std::abs(acc);
}

// max |Q| over the grid, abandoning early once `cutoff` is exceeded
inline double grid_sup(const std::vector<std::int8_t>& c, const std::vector<double>& zs,
                       const std::vector<std::size_t>& order, double cutoff) {
  double best = 0.0;
  for (std::size_t i : order) {
    const double v = abs_horner(c, zs[i]);
    if (v > best) {
      best = v;
      if (best > cutoff) return best;
    }
  }
  return best;
}

// golden-section polish of |Q| around the grid maximizer; only ever raises
// the reported value
inline double refine_sup(const std::vector<std::int8_t>& c, const std::vector<double>& zs) {
  std::size_t arg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double v = abs_horner(c, zs[i]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  // grid is decreasing in i
  double lo = arg + 1 < zs.size() ? zs[arg + 1] : zs[arg];
  double hi = arg > 0 ? zs[arg - 1] : zs[arg];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double c1 = b - gr * (b - a);
    const double c2 = a + gr * (b - a);
    const double f1 = abs_horner(c, c1);
    const double f2 = abs_horner(c, c2);
    best = std::max({best, f1, f2});
    if (f1 > f2)
      b = c2;
    else
      a = c1;
  }
  return best;
}

inline bool lex_less(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct SearchBest {
  double sup = std::numeric_limits<double>::infinity();
  std::vector<std::int8_t> coeffs;

  void offer(double s, const std::vector<std::int8_t>& c) {
    if (s < sup || (s == sup && (coeffs.empty() || lex_less(c, coeffs)))) {
      sup = s;
      coeffs = c;
    }
  }
};

inline std::uint64_t pow3(int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= 3;
  return v;
}

// scan candidate indices [lo, hi): base-3 odometer over {-1,0,1}^(degree+1),
// negation classes halved by requiring the first nonzero coefficient be +1
inline SearchBest exhaustive_scan(int degree, std::uint64_t lo, std::uint64_t hi,
                                  const std::vector<double>& zs,
                                  const std::vector<std::size_t>& order,
                                  std::atomic<double>& shared_best) {
  const int n = degree + 1;
  std::vector<std::int8_t> digits(n, 0);
  std::uint64_t v = lo;
  for (int k = 0; k < n; ++k) {
    digits[k] = static_cast<std::int8_t>(v % 3);
    v /= 3;
  }
  std::vector<std::int8_t> c(n);
  SearchBest best;
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    int first_nonzero = -1;
    for (int k = 0; k < n; ++k) {
      c[k] = static_cast<std::int8_t>(digits[k] - 1);
      if (first_nonzero < 0 && c[k] != 0) first_nonzero = k;
    }
    if (first_nonzero >= 0 && c[first_nonzero] == 1) {
      const double cutoff = std::min(best.sup, shared_best.load(std::memory_order_relaxed));
      const double s = grid_sup(c, zs, order, cutoff);
      if (s <= cutoff) {
        best.offer(s, c);
        double cur = shared_best.load(std::memory_order_relaxed);
        while (s < cur && !shared_best.compare_exchange_weak(cur, s, std::memory_order_relaxed)) {
        }
      }
    }
    // odometer increment
    for (int k = 0; k < n; ++k) {
      if (++digits[k] < 3) break;
      digits[k] = 0;
    }
  }
  return best;
}

}  // namespace detail

// Minimum grid sup over nonzero coefficient vectors, exhaustively (degree <=
// 15) or by simulated annealing within `budget` proposals. Deterministic for
// a fixed seed and independent of the worker count. The reported
// representative is the lexicographically smaller of {Q, -Q}.
inline LittlewoodPoly search_q(int degree, SearchMode mode, std::int64_t budget = 0,
                               std::uint64_t seed = 1, unsigned workers = 1) {
  if (degree < 0) throw std::invalid_argument("search_q: degree must be >= 0");
  const std::vector<double> zs = detail::chebyshev_grid01(degree);
  const std::vector<std::size_t> order = detail::strided_order(zs.size());
  detail::SearchBest best;

  if (mode == SearchMode::exhaustive) {
    if (degree > 15) throw std::invalid_argument("search_q: exhaustive mode requires degree <= 15");
    const std::uint64_t total = detail::pow3(degree + 1);
    std::atomic<double> shared_best{std::numeric_limits<double>::infinity()};
    if (workers <= 1) {
      best = detail::exhaustive_scan(degree, 0, total, zs, order, shared_best);
    } else {
      std::vector<detail::SearchBest> partial(workers);
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (total + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = std::min<std::uint64_t>(w * chunk, total);
        const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, total);
        pool.emplace_back([&, w, lo, hi] {
          partial[w] = detail::exhaustive_scan(degree, lo, hi, zs, order, shared_best);
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& p : partial)
        if (!p.coeffs.empty()) best.offer(p.sup, p.coeffs);
    }
  } else {
    if (budget <= 0) budget = 200000;
    Rng rng(seed);
    const int n = degree + 1;
    std::vector<std::int8_t> cur(n, 0);
    auto randomize = [&] {
      do {
        for (auto& v : cur) v = static_cast<std::int8_t>(static_cast<int>(rng.next_u64() % 3) - 1);
      } while (std::all_of(cur.begin(), cur.end(), [](std::int8_t v) { return v == 0; }));
    };
    randomize();
    const double inf = std::numeric_limits<double>::infinity();
    double cur_sup = detail::grid_sup(cur, zs, order, inf);
    best.offer(cur_sup, cur);
    const double t0 = 0.25, t1 = 1e-4;
    for (std::int64_t step = 0; step < budget; ++step) {
      const double temp =
          t0 * std::pow(t1 / t0, static_cast<double>(step) / static_cast<double>(budget));
      const auto pos = static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(n));
      const std::int8_t old = cur[pos];
      std::int8_t next = static_cast<std::int8_t>(static_cast<int>(rng.next_u64() % 2) - 1);
      if (next >= old) ++next;  // uniform over the other two values
      cur[pos] = next;
      if (std::all_of(cur.begin(), cur.end(), [](std::int8_t v) { return v == 0; })) {
        cur[pos] = old;
        continue;
      }
      const double s = detail::grid_sup(cur, zs, order, inf);
      if (s <= cur_sup || rng.next_double() < std::exp((cur_sup - s) / temp)) {
        cur_sup = s;
        best.offer(s, cur);
      } else {
        cur[pos] = old;
      }
    }
  }

  std::vector<std::int8_t> rep = best.coeffs;
  std::vector<std::int8_t> neg(rep);
  for (auto& v : neg) v = static_cast<std::int8_t>(-v);
  if (detail::lex_less(neg, rep)) rep = neg;
  LittlewoodPoly out{SignedSeq(std::move(rep)), 0.0};
  out.sup01 = std::max(best.sup, detail::refine_sup(out.coeffs.coeffs(), zs));
  return out;
}

struct QSplit {
  BitString phi;  // 1 where the coefficient is +1
  BitString psi;  // 1 where the coefficient is -1
};

inline QSplit split_q(const LittlewoodPoly& Q) {
  std::vector<std::uint8_t> phi(Q.coeffs.size(), 0), psi(Q.coeffs.size(), 0);
  for (std::size_t k = 0; k < Q.coeffs.size(); ++k) {
    if (Q.coeffs[k] == 1) phi[k] = 1;
    if (Q.coeffs[k] == -1) psi[k] = 1;
  }
  return QSplit{BitString(std::move(phi)), BitString(std::move(psi))};
}

// Pair of strings whose difference polynomial is z^m Q(z): m leading zeros,
// the phi/psi coefficients, and the leftover padding on the right.
struct HardPair {
  BitString x, y;
  std::size_t m = 0;
  LittlewoodPoly Q;
};

inline HardPair build_hard_pair(const LittlewoodPoly& Q, std::size_t n) {
  const std::size_t width = Q.coeffs.size();
  if (n < width) throw std::invalid_argument("build_hard_pair: n must be >= deg Q + 1");
  const std::size_t m = (n - width) / 2;
  const QSplit s = split_q(Q);
  std::vector<std::uint8_t> x(n, 0), y(n, 0);
  for (std::size_t k = 0; k < width; ++k) {
    x[m + k] = s.phi[k];
    y[m + k] = s.psi[k];
  }
  return HardPair{BitString(std::move(x)), BitString(std::move(y)), m, Q};
}

struct PerBitGap {
  MeanProfile profile;  // b_j = E[X~_j] - E[Y~_j], exact
  double max_abs = 0.0;
  std::size_t argmax = 0;
};

inline PerBitGap per_bit_gap(const HardPair& pair, double q) {
  PerBitGap g;
  g.profile = profile_difference(exact_deletion_means(pair.x, q), exact_deletion_means(pair.y, q));
  for (std::size_t j = 0; j < g.profile.horizon(); ++j) {
    const double v = std::abs(g.profile.means[j]);
    if (v > g.max_abs) {
      g.max_abs = v;
      g.argmax = j;
    }
  }
  return g;
}

// Cross-check of the same gaps through the circle integral
//   b_j = (1/2pi) Int e^(-i j theta) p A(p e^(i theta) + q) d theta,
// discretized as an N-point rectangle rule, which is exact for trigonometric
// polynomials of degree below N (here degree <= n-1).
inline std::vector<double> per_bit_gap_integral(const HardPair& pair, double q,
                                                std::size_t points = 4096) {
  const std::size_t n = pair.x.size();
  if (points <= n) throw std::invalid_argument("per_bit_gap_integral: need points > n");
  const double p = 1.0 - q;
  const SignedSeq a = diff_seq(pair.x, pair.y);
  std::vector<Complex> ring(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double theta =
        -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
    ring[i] = p * eval_poly(a, Complex(p * std::cos(theta) + q, p * std::sin(theta)));
  }
  std::vector<double> b(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < points; ++i) {
      const double theta =
          -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
      acc += std::polar(1.0, -static_cast<double>(j) * theta) * ring[i];
    }
    b[j] = acc.real() / static_cast<double>(points);
  }
  return b;
}

// Greedy-coupling bound: TV of T-sample single-bit laws <= min(1, T |b_j|).
inline double tv_bound_per_bit(double b_j, std::int64_t T) {
  if (T < 1) throw std::invalid_argument("tv_bound_per_bit: T must be >= 1");
  return std::min(1.0, static_cast<double>(T) * std::abs(b_j));
}

namespace detail {

inline double binomial_pmf(std::int64_t T, double p, std::int64_t k) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == T ? 1.0 : 0.0;
  const double lc = std::lgamma(static_cast<double>(T) + 1.0) -
                    std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(T - k) + 1.0);
  return std::exp(lc + static_cast<double>(k) * std::log(p) +
                  static_cast<double>(T - k) * std::log1p(-p));
}

}  // namespace detail

// Exact TV between T i.i.d. Bernoulli(p1) bits and T i.i.d. Bernoulli(p2)
// bits. The likelihood ratio depends only on the success count, so this
// equals the TV of the two Binomial(T, .) laws.
inline double exact_product_bernoulli_tv(double p1, double p2, std::int64_t T) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
    throw std::invalid_argument("exact_product_bernoulli_tv: probabilities must be in [0,1]");
  if (T < 1) throw std::invalid_argument("exact_product_bernoulli_tv: T must be >= 1");
  if (T > 1000000) throw std::range_error("exact_product_bernoulli_tv: T exceeds summation budget");
  double acc = 0.0;
  for (std::int64_t k = 0; k <= T; ++k)
    acc += std::abs(detail::binomial_pmf(T, p1, k) - detail::binomial_pmf(T, p2, k));
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

}  // namespace tracekit
