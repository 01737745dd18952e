#pragma once
// Reconstruction from traces: pairwise index selection, the "beats" relation,
// unbeaten-candidate reconstruction (tournament or all-pairs), Chernoff
// sample-size planning, and the bitwise majority alignment baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tracekit/bitstring.hpp"
#include "tracekit/channels.hpp"
#include "tracekit/meanstats.hpp"

namespace tracekit {

// Test plan for distinguishing a fixed pair (x, y): the output index with the
// widest exact mean gap, and the two exact means there.
struct PairTestPlan {
  std::size_t j_star = 0;
  double eta = 0.0;  // |mean_x - mean_y| at j_star, > 0
  double mean_x = 0.0;
  double mean_y = 0.0;
};

enum class IndexRule {
  argmax,                   // maximize the mean gap (maximizes the test exponent)
  smallest_above_threshold  // first index whose gap exceeds a caller threshold
};

namespace detail {

inline PairTestPlan plan_from_profiles(const std::vector<double>& mx,
                                       const std::vector<double>& my, IndexRule rule,
                                       double threshold) {
  PairTestPlan plan;
  if (rule == IndexRule::argmax) {
    double best = -1.0;
    for (std::size_t j = 0; j < mx.size(); ++j) {
      const double gap = std::abs(mx[j] - my[j]);
      if (gap > best) {
        best = gap;
        plan.j_star = j;
      }
    }
    plan.eta = best;
  } else {
    bool found = false;
    for (std::size_t j = 0; j < mx.size(); ++j) {
      const double gap = std::abs(mx[j] - my[j]);
      if (gap > threshold) {
        plan.j_star = j;
        plan.eta = gap;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("select_index: no index exceeds the supplied threshold");
  }
  plan.mean_x = mx[plan.j_star];
  plan.mean_y = my[plan.j_star];
  return plan;
}

}  // namespace detail

inline PairTestPlan select_index(const BitString& x, const BitString& y, const ChannelSpec& spec,
                                 IndexRule rule = IndexRule::argmax, double threshold = 0.0) {
  if (x == y) throw std::invalid_argument("select_index: x and y must differ");
  const MeanProfile mx = exact_channel_means(x, spec);
  const MeanProfile my = exact_channel_means(y, spec);
  return detail::plan_from_profiles(mx.means, my.means, rule, threshold);
}

// y beats x when the observed mean at j_star is at least as close to y's
// exact mean as to x's (ties count as a beat in both directions).
inline bool beats(double sample_mean_at_j, const PairTestPlan& plan) {
  return std::abs(sample_mean_at_j - plan.mean_y) <= std::abs(sample_mean_at_j - plan.mean_x);
}

// Smallest T with 2^n exp(-T eta^2 / 2) <= delta.
inline std::int64_t chernoff_sample_size(double eta, int n, double delta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("chernoff_sample_size: eta must be in (0,1]");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("chernoff_sample_size: delta must be in (0,1)");
  if (n < 0) throw std::invalid_argument("chernoff_sample_size: n must be >= 0");
  const double t = (2.0 / (eta * eta)) * (static_cast<double>(n) * std::log(2.0) + std::log(1.0 / delta));
  return static_cast<std::int64_t>(std::ceil(t));
}

struct ReconstructionResult {
  BitString estimate;
  int unbeaten_count = 0;  // 0 or 1
  bool ambiguous = false;  // true when no unbeaten candidate exists
};

// Reconstruction over a fixed candidate set. Exact candidate mean profiles
// are computed once at construction so repeated trace sets are cheap.
//
// The tournament walks the candidates once (challenger vs incumbent, using
// that pair's plan) and then verifies the surviving incumbent against the
// whole set. An unbeaten candidate wins every duel it enters, so when one
// exists the tournament finds exactly it; the all-pairs mode recomputes the
// unbeaten set directly and exists to validate that shortcut.
class UnbeatenReconstructor {
 public:
  enum class Mode { tournament, all_pairs };

  UnbeatenReconstructor(std::vector<BitString> candidates, const ChannelSpec& spec,
                        Mode mode = Mode::tournament)
      : candidates_(std::move(candidates)), mode_(mode) {
    if (candidates_.empty())
      throw std::invalid_argument("UnbeatenReconstructor: empty candidate set");
    n_ = candidates_[0].size();
    std::unordered_set<std::string> seen;
    for (const auto& c : candidates_) {
      if (c.size() != n_)
        throw std::invalid_argument("UnbeatenReconstructor: candidate length mismatch");
      if (!seen.insert(c.to_string()).second)
        throw std::invalid_argument("UnbeatenReconstructor: duplicate candidate");
    }
    if (mode_ == Mode::all_pairs && n_ > 12)
      throw std::invalid_argument("UnbeatenReconstructor: all-pairs mode limited to n <= 12");
    profiles_.reserve(candidates_.size());
    for (const auto& c : candidates_) profiles_.push_back(exact_channel_means(c, spec).means);
  }

  std::size_t source_length() const { return n_; }

  ReconstructionResult reconstruct(const TraceSet& ts) const {
    return reconstruct(empirical_means(ts, n_).means);
  }

  ReconstructionResult reconstruct(const std::vector<double>& sample_means) const {
    if (sample_means.size() < n_)
      throw std::invalid_argument("UnbeatenReconstructor: sample means shorter than n");
    return mode_ == Mode::tournament ? run_tournament(sample_means) : run_all_pairs(sample_means);
  }

 private:
  // does candidate b beat candidate a, under the (a,b) pair plan?
  bool duel(std::size_t a, std::size_t b, const std::vector<double>& s) const {
    const PairTestPlan plan =
        detail::plan_from_profiles(profiles_[a], profiles_[b], IndexRule::argmax, 0.0);
    return beats(s[plan.j_star], plan);
  }

  ReconstructionResult fallback() const {
    const auto it = std::min_element(candidates_.begin(), candidates_.end());
    return ReconstructionResult{*it, 0, true};
  }

  ReconstructionResult run_tournament(const std::vector<double>& s) const {
    std::size_t champ = 0;
    for (std::size_t c = 1; c < candidates_.size(); ++c)
      if (duel(champ, c, s)) champ = c;
    for (std::size_t y = 0; y < candidates_.size(); ++y)
      if (y != champ && duel(champ, y, s)) return fallback();
    return ReconstructionResult{candidates_[champ], 1, false};
  }

  ReconstructionResult run_all_pairs(const std::vector<double>& s) const {
    std::vector<std::size_t> unbeaten;
    for (std::size_t x = 0; x < candidates_.size(); ++x) {
      bool ok = true;
      for (std::size_t y = 0; y < candidates_.size() && ok; ++y)
        if (y != x && duel(x, y, s)) ok = false;
      if (ok) unbeaten.push_back(x);
    }
    if (unbeaten.size() > 1)
      throw std::logic_error("UnbeatenReconstructor: more than one unbeaten candidate");
    if (unbeaten.empty()) return fallback();
    return ReconstructionResult{candidates_[unbeaten[0]], 1, false};
  }

  std::vector<BitString> candidates_;
  Mode mode_;
  std::size_t n_ = 0;
  std::vector<std::vector<double>> profiles_;
};

// All 2^n strings of length n; capped to keep candidate sets enumerable.
inline std::vector<BitString> enumerate_all_strings(std::size_t n) {
  if (n == 0 || n > 20) throw std::invalid_argument("enumerate_all_strings: need 1 <= n <= 20");
  std::vector<BitString> out;
  out.reserve(1ull << n);
  for (std::uint64_t v = 0; v < (1ull << n); ++v) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t k = 0; k < n; ++k) bits[k] = static_cast<std::uint8_t>((v >> k) & 1);
    out.emplace_back(std::move(bits));
  }
  return out;
}

inline ReconstructionResult reconstruct_unbeaten(
    const TraceSet& ts, std::vector<BitString> candidates, const ChannelSpec& spec,
    UnbeatenReconstructor::Mode mode = UnbeatenReconstructor::Mode::tournament) {
  return UnbeatenReconstructor(std::move(candidates), spec, mode).reconstruct(ts);
}

struct BmaResult {
  BitString estimate;
  bool exhausted_early = false;  // all traces ran out before n bits
};

// Bitwise majority alignment: one pointer per trace; each step majority-votes
// the pointed bits (exhausted traces abstain, ties go to 0) and advances only
// the pointers that agreed with the vote.
inline BmaResult bma_reconstruct(const TraceSet& ts, std::size_t n) {
  if (n == 0) throw std::invalid_argument("bma_reconstruct: n must be >= 1");
  if (ts.traces.empty()) throw std::invalid_argument("bma_reconstruct: empty trace set");
  std::vector<std::size_t> ptr(ts.traces.size(), 0);
  std::vector<std::uint8_t> out(n, 0);
  bool exhausted = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ones = 0, voters = 0;
    for (std::size_t t = 0; t < ts.traces.size(); ++t) {
      if (ptr[t] < ts.traces[t].bits.size()) {
        ++voters;
        ones += ts.traces[t].bits[ptr[t]];
      }
    }
    if (voters == 0) {
      exhausted = true;
      break;  // remainder stays zero-filled
    }
    const std::uint8_t maj = (2 * ones > voters) ? 1 : 0;
    out[i] = maj;
    for (std::size_t t = 0; t < ts.traces.size(); ++t)
      if (ptr[t] < ts.traces[t].bits.size() && ts.traces[t].bits[ptr[t]] == maj) ++ptr[t];
  }
  return BmaResult{BitString(std::move(out)), exhausted};
}

}  // namespace tracekit
