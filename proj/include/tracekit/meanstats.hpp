#pragma once
// Per-position bit means of padded channel outputs, exact and empirical, and
// the triangular inversion recovering the input string from deletion-channel
// means.
//
// Deletion channel, input a in R^n:  E[out_j] = p * sum_{k>=j} a_k C(k,j) p^j q^(k-j)
// equivalently sum_j E[out_j] w^j = p * A(p*w + q).
// Coupled insertion channels, a = x - y:
//   E[D_j] = sum_{k<=min(j,n-1)} C(j,k) alpha^(k+1) beta^(j-k) a_k
// equivalently sum_j E[D_j] w^(j+1) = sum_k a_k (alpha*w / (1 - beta*w))^(k+1).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracekit/analytic.hpp"
#include "tracekit/bitstring.hpp"
#include "tracekit/channels.hpp"

namespace tracekit {

// Pascal triangle in doubles, rows 0..1023. Rows beyond that overflow the
// double range around C(1024, 512), so callers get a range error instead.
inline constexpr std::size_t kMaxBinomialRow = 1023;

inline double binomial(std::size_t k, std::size_t j) {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> t(kMaxBinomialRow + 1);
    t[0] = {1.0};
    for (std::size_t r = 1; r <= kMaxBinomialRow; ++r) {
      t[r].resize(r + 1);
      t[r][0] = t[r][r] = 1.0;
      for (std::size_t c = 1; c < r; ++c) t[r][c] = t[r - 1][c - 1] + t[r - 1][c];
    }
    return t;
  }();
  if (k > kMaxBinomialRow) throw std::range_error("binomial: row exceeds 1023");
  if (j > k) return 0.0;
  return table[k][j];
}

struct MeanProfile {
  enum class Kind { exact, empirical };

  std::vector<double> means;
  std::vector<double> stderrs;  // empty for exact profiles
  Kind kind = Kind::exact;

  std::size_t horizon() const { return means.size(); }
};

// Entrywise difference a - b; standard errors combine in quadrature.
inline MeanProfile profile_difference(const MeanProfile& a, const MeanProfile& b) {
  if (a.horizon() != b.horizon())
    throw std::invalid_argument("profile_difference: horizon mismatch");
  MeanProfile d;
  d.means.resize(a.horizon());
  for (std::size_t j = 0; j < a.horizon(); ++j) d.means[j] = a.means[j] - b.means[j];
  if (!a.stderrs.empty() || !b.stderrs.empty()) {
    d.stderrs.resize(a.horizon(), 0.0);
    for (std::size_t j = 0; j < a.horizon(); ++j) {
      const double sa = j < a.stderrs.size() ? a.stderrs[j] : 0.0;
      const double sb = j < b.stderrs.size() ? b.stderrs[j] : 0.0;
      d.stderrs[j] = std::sqrt(sa * sa + sb * sb);
    }
  }
  d.kind = (a.kind == MeanProfile::Kind::exact && b.kind == MeanProfile::Kind::exact)
               ? MeanProfile::Kind::exact
               : MeanProfile::Kind::empirical;
  return d;
}

// Exact expectation of every padded output bit of the deletion channel.
inline MeanProfile exact_deletion_means(const BitString& x, double q) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::invalid_argument("exact_deletion_means: q must be in [0,1)");
  const std::size_t n = x.size();
  if (n > kMaxBinomialRow + 1) throw std::range_error("exact_deletion_means: n exceeds 1024");
  const double p = 1.0 - q;
  MeanProfile m;
  m.means.assign(n, 0.0);
  std::vector<double> qpow(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) qpow[i] = qpow[i - 1] * q;
  double pj1 = p;  // p^(j+1)
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = j; k < n; ++k)
      if (x[k]) acc += binomial(k, j) * qpow[k - j];
    m.means[j] = acc * pj1;
    pj1 *= p;
  }
  return m;
}

// P(deletion output length > j) = P(Binomial(n, p) >= j+1).
inline double deletion_survival(std::size_t n, double q, std::size_t j) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("deletion_survival: q must be in [0,1)");
  if (j >= n) return 0.0;
  const double p = 1.0 - q;
  double acc = 0.0;
  for (std::size_t i = j + 1; i <= n; ++i)
    acc += binomial(n, i) * std::pow(p, static_cast<double>(i)) *
           std::pow(q, static_cast<double>(n - i));
  return acc;
}

// Exact single-string means under a deletion and/or substitution channel:
//   E[out_j] = (1-2*lambda) * E[del_j] + lambda * P(len > j)
// The value is the same for either stage order. Insertion stages are not
// supported here (the output means lose the triangular structure).
inline MeanProfile exact_channel_means(const BitString& x, const ChannelSpec& spec) {
  spec.validate();
  if (spec.has(Stage::insertion))
    throw std::invalid_argument("exact_channel_means: insertion stage not supported");
  const double q = spec.effective_q();
  const double lambda = spec.effective_lambda();
  MeanProfile m = exact_deletion_means(x, q);
  if (lambda > 0.0) {
    for (std::size_t j = 0; j < m.horizon(); ++j)
      m.means[j] = (1.0 - 2.0 * lambda) * m.means[j] + lambda * deletion_survival(x.size(), q, j);
  }
  return m;
}

struct InsertionGapProfile {
  MeanProfile profile;     // E[X*_j - Y*_j] for j < horizon
  double tail_bound = 0.0; // sum_{j>=horizon} |E[D_j]| <= this truncation mass
};

// recommended horizon: negative-binomial bulk plus ten standard deviations
inline std::size_t default_insertion_horizon(std::size_t n, double beta) {
  const double alpha = 1.0 - beta;
  const double bulk = std::ceil(static_cast<double>(n + 1) / alpha);
  const double spread = std::ceil(10.0 * std::sqrt(static_cast<double>(n + 1) * beta / (alpha * alpha)));
  return static_cast<std::size_t>(bulk + spread);
}

// Exact difference-of-means profile for coupled insertion channels, truncated
// at `horizon` with the leftover mass reported as tail_bound.
inline InsertionGapProfile exact_insertion_gap_means(const BitString& x, const BitString& y,
                                                     double beta, std::size_t horizon) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("exact_insertion_gap_means: beta must be in [0,1)");
  if (x.size() != y.size())
    throw std::invalid_argument("exact_insertion_gap_means: length mismatch");
  const std::size_t n = x.size();
  if (horizon < n) throw std::invalid_argument("exact_insertion_gap_means: horizon < n");
  if (horizon > kMaxBinomialRow + 1)
    throw std::range_error("exact_insertion_gap_means: horizon exceeds 1024");
  const double alpha = 1.0 - beta;
  const SignedSeq a = diff_seq(x, y);

  InsertionGapProfile out;
  out.profile.means.assign(horizon, 0.0);
  // covered[k] = sum_{j<horizon} P(G_0+...+G_k = j+1); complement bounds the tail
  std::vector<double> covered(n, 0.0);
  for (std::size_t j = 0; j < horizon; ++j) {
    double acc = 0.0;
    const std::size_t kmax = std::min(j, n - 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
      const double pmf = binomial(j, k) * std::pow(alpha, static_cast<double>(k + 1)) *
                         std::pow(beta, static_cast<double>(j - k));
      covered[k] += pmf;
      acc += pmf * static_cast<double>(a[k]);
    }
    out.profile.means[j] = acc;
  }
  for (std::size_t k = 0; k < n; ++k)
    if (a[k] != 0) out.tail_bound += std::max(0.0, 1.0 - covered[k]);
  return out;
}

// Per-position average of zero-padded traces; stderr[j] = sqrt(m(1-m)/T).
inline MeanProfile empirical_means(const TraceSet& ts, std::size_t horizon) {
  if (ts.traces.empty()) throw std::invalid_argument("empirical_means: empty trace set");
  if (horizon < 1) throw std::invalid_argument("empirical_means: horizon must be >= 1");
  MeanProfile m;
  m.kind = MeanProfile::Kind::empirical;
  m.means.assign(horizon, 0.0);
  for (const Trace& t : ts.traces) {
    const std::size_t upto = std::min(horizon, t.bits.size());
    for (std::size_t j = 0; j < upto; ++j) m.means[j] += t.bits[j];
  }
  const double T = static_cast<double>(ts.traces.size());
  m.stderrs.assign(horizon, 0.0);
  for (std::size_t j = 0; j < horizon; ++j) {
    m.means[j] /= T;
    m.stderrs[j] = std::sqrt(m.means[j] * (1.0 - m.means[j]) / T);
  }
  return m;
}

// sum_j means[j] w^j by backward recurrence, guarded against overflow.
inline Complex gen_series_at_w(const MeanProfile& m, Complex w) {
  if (m.horizon() == 0) throw std::invalid_argument("gen_series_at_w: empty profile");
  if (!is_finite(w)) throw std::invalid_argument("gen_series_at_w: non-finite argument");
  const double growth = static_cast<double>(m.horizon()) * std::log(std::abs(w));
  if (growth > 600.0) throw std::range_error("gen_series_at_w: |w|^horizon out of double range");
  return eval_poly(m.means, w);
}

namespace detail {

// Exact padded means of the deletion(+substitution) channel by enumerating
// all 2^n deletion masks; the independent route used for cross-checks.
inline std::vector<double> mask_enumeration_means(const BitString& x, double q, double lambda) {
  const std::size_t n = x.size();
  if (n > 20) throw std::range_error("mask_enumeration_means: n too large for enumeration");
  const double p = 1.0 - q;
  std::vector<double> means(n, 0.0);
  std::vector<double> ppow(n + 1, 1.0), qpow(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    ppow[i] = ppow[i - 1] * p;
    qpow[i] = qpow[i - 1] * q;
  }
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    const int kept = std::popcount(mask);
    const double prob = ppow[kept] * qpow[n - kept];
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1ull << k)) {
        // materialized bit: flipped with probability lambda
        means[pos] += prob * (lambda + (1.0 - 2.0 * lambda) * static_cast<double>(x[k]));
        ++pos;
      }
    }
  }
  return means;
}

}  // namespace detail

struct SubstitutionGapCheck {
  double residual = 0.0;
  double confidence_radius = 0.0;  // 0 in exact mode
  bool exact_mode = true;
};

// Residual of the deletion+substitution difference identity
//   sum_j E[X#_j - Y#_j] w^j = (1-2*lambda) p A(p*w+q),  A from a = x - y,
// with the left side taken from mask enumeration (n <= 12) or Monte Carlo.
inline SubstitutionGapCheck substitution_gap_check(const BitString& x, const BitString& y,
                                                   double q, double lambda, Complex w,
                                                   std::size_t mc_samples = 200000,
                                                   std::uint64_t seed = 0x7261636b6b697431ull) {
  if (x.size() != y.size()) throw std::invalid_argument("substitution_gap_check: length mismatch");
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("substitution_gap_check: bad q");
  if (!(lambda >= 0.0 && lambda < 0.5)) throw std::invalid_argument("substitution_gap_check: bad lambda");
  const std::size_t n = x.size();
  const double growth = static_cast<double>(n) * std::log(std::abs(w));
  if (growth > 600.0) throw std::range_error("substitution_gap_check: |w|^n out of double range");
  const double p = 1.0 - q;

  SubstitutionGapCheck out;
  std::vector<double> gap(n, 0.0);
  if (n <= 12) {
    const auto mx = detail::mask_enumeration_means(x, q, lambda);
    const auto my = detail::mask_enumeration_means(y, q, lambda);
    for (std::size_t j = 0; j < n; ++j) gap[j] = mx[j] - my[j];
  } else {
    out.exact_mode = false;
    const ChannelSpec spec = ChannelSpec::deletion_substitution(q, lambda);
    const TraceSet tx = sample_traces(x, spec, mc_samples, derive_seed(seed, 0));
    const TraceSet ty = sample_traces(y, spec, mc_samples, derive_seed(seed, 1));
    const MeanProfile ex = empirical_means(tx, n);
    const MeanProfile ey = empirical_means(ty, n);
    double conf2 = 0.0;
    double wpow = 1.0;
    const double aw = std::abs(w);
    for (std::size_t j = 0; j < n; ++j) {
      gap[j] = ex.means[j] - ey.means[j];
      const double se = std::sqrt(ex.stderrs[j] * ex.stderrs[j] + ey.stderrs[j] * ey.stderrs[j]);
      conf2 += se * wpow * se * wpow;
      wpow *= aw;
    }
    out.confidence_radius = 5.0 * std::sqrt(conf2);
  }

  const Complex lhs = eval_poly(gap, w);
  const Complex rhs = (1.0 - 2.0 * lambda) * p * eval_poly(diff_seq(x, y), p * w + q);
  out.residual = std::abs(lhs - rhs);
  return out;
}

class InversionUnstableError : public std::runtime_error {
 public:
  InversionUnstableError(std::size_t position, double value)
      : std::runtime_error("invert_deletion_means: unstable at position " +
                           std::to_string(position) + " (value " + std::to_string(value) + ")"),
        position(position),
        value(value) {}
  std::size_t position;
  double value;
};

struct InversionResult {
  BitString bits;
  double max_residual = 0.0;  // largest pre-rounding distance from {0,1}
};

// Back-substitution on the triangular system linking deletion means to the
// input: a_k = m_k p^-(k+1) - sum_{k'>k} a_k' C(k',k) q^(k'-k), solved from
// k = n-1 downward. Rounding each recovered value to {0,1} arrests error
// propagation; values farther than 0.5 from both raise InversionUnstableError.
inline InversionResult invert_deletion_means(const MeanProfile& m, double q) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::invalid_argument("invert_deletion_means: q must be in [0,1)");
  const std::size_t n = m.horizon();
  if (n == 0) throw std::invalid_argument("invert_deletion_means: empty profile");
  if (n > kMaxBinomialRow + 1) throw std::range_error("invert_deletion_means: n exceeds 1024");
  const double p = 1.0 - q;
  std::vector<std::uint8_t> bits(n, 0);
  double max_residual = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    double v = m.means[k] * std::pow(p, -static_cast<double>(k + 1));
    double qp = q;
    for (std::size_t k2 = k + 1; k2 < n; ++k2) {
      if (bits[k2]) v -= binomial(k2, k) * qp;
      qp *= q;
    }
    const double dist0 = std::abs(v);
    const double dist1 = std::abs(v - 1.0);
    if (std::min(dist0, dist1) > 0.5) throw InversionUnstableError(k, v);
    bits[k] = v < 0.5 ? 0 : 1;
    max_residual = std::max(max_residual, std::min(dist0, dist1));
  }
  return InversionResult{BitString(std::move(bits)), max_residual};
}

}  // namespace tracekit
