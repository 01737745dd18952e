#pragma once
// Deletion / substitution / insertion channels and their compositions.
//
// Deletion keeps each input bit independently with probability p = 1-q and
// concatenates the survivors in order. Substitution flips each materialized
// bit with probability lambda (conceptual zero padding is never flipped).
// Insertion emits G_k - 1 fair bits before input bit k (and after the last
// one), with G_k i.i.d. Geometric(alpha) on {1,2,...}, beta = 1 - alpha.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tracekit/bitstring.hpp"
#include "tracekit/rng.hpp"
#include "tracekit/text.hpp"

namespace tracekit {

enum class Stage { deletion, substitution, insertion };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::deletion: return "deletion";
    case Stage::substitution: return "substitution";
    case Stage::insertion: return "insertion";
  }
  return "?";
}

struct ChannelSpec {
  double deletion_q = 0.0;         // in [0,1)
  double substitution_lambda = 0.0;  // in [0,1/2)
  double insertion_beta = 0.0;     // in [0,1)
  std::vector<Stage> stage_order;  // enabled stages, applied left to right

  double retention_p() const { return 1.0 - deletion_q; }
  double insertion_alpha() const { return 1.0 - insertion_beta; }

  bool has(Stage s) const {
    return std::find(stage_order.begin(), stage_order.end(), s) != stage_order.end();
  }

  // parameter of a stage, or the identity value when the stage is disabled
  double effective_q() const { return has(Stage::deletion) ? deletion_q : 0.0; }
  double effective_lambda() const { return has(Stage::substitution) ? substitution_lambda : 0.0; }
  double effective_beta() const { return has(Stage::insertion) ? insertion_beta : 0.0; }

  void validate() const {
    if (!(deletion_q >= 0.0 && deletion_q < 1.0))
      throw std::invalid_argument("ChannelSpec: q must be in [0,1)");
    if (!(substitution_lambda >= 0.0 && substitution_lambda < 0.5))
      throw std::invalid_argument("ChannelSpec: lambda must be in [0,1/2)");
    if (!(insertion_beta >= 0.0 && insertion_beta < 1.0))
      throw std::invalid_argument("ChannelSpec: beta must be in [0,1)");
    for (std::size_t i = 0; i < stage_order.size(); ++i)
      for (std::size_t j = i + 1; j < stage_order.size(); ++j)
        if (stage_order[i] == stage_order[j])
          throw std::invalid_argument("ChannelSpec: each stage appears at most once");
  }

  static ChannelSpec deletion_only(double q) {
    ChannelSpec s;
    s.deletion_q = q;
    s.stage_order = {Stage::deletion};
    s.validate();
    return s;
  }

  static ChannelSpec deletion_substitution(double q, double lambda) {
    ChannelSpec s;
    s.deletion_q = q;
    s.substitution_lambda = lambda;
    s.stage_order = {Stage::deletion, Stage::substitution};
    s.validate();
    return s;
  }

  static ChannelSpec insertion_only(double beta) {
    ChannelSpec s;
    s.insertion_beta = beta;
    s.stage_order = {Stage::insertion};
    s.validate();
    return s;
  }
};

// One channel output. Stored bits are the materialized output; padded_bit
// exposes the zero-padded view without mutating anything.
struct Trace {
  std::vector<std::uint8_t> bits;
  std::uint64_t origin_seed = 0;

  std::size_t size() const { return bits.size(); }
  std::uint8_t padded_bit(std::size_t j) const { return j < bits.size() ? bits[j] : 0; }
};

namespace detail {

inline std::vector<std::uint8_t> delete_bits(const std::vector<std::uint8_t>& in, double q,
                                             Rng& rng) {
  const double p = 1.0 - q;
  std::vector<std::uint8_t> out;
  out.reserve(in.size());
  for (auto b : in)
    if (rng.next_double() < p) out.push_back(b);
  return out;
}

inline std::vector<std::uint8_t> substitute_bits(std::vector<std::uint8_t> bits, double lambda,
                                                 Rng& rng) {
  for (auto& b : bits)
    if (rng.next_double() < lambda) b ^= 1;
  return bits;
}

inline std::vector<std::uint8_t> insert_bits(const std::vector<std::uint8_t>& in, double beta,
                                             Rng& rng) {
  const double alpha = 1.0 - beta;
  const std::size_t n = in.size();
  // loud failure instead of silent truncation; P(hit) < 2^-50 at this cap
  const double cap = 64.0 * static_cast<double>(n == 0 ? 1 : n) / alpha;
  std::vector<std::uint8_t> out;
  out.reserve(n + 8);
  for (std::size_t k = 0; k <= n; ++k) {
    const std::int64_t gap = rng.geometric_from_beta(beta) - 1;
    for (std::int64_t i = 0; i < gap; ++i) out.push_back(rng.next_bit() ? 1 : 0);
    if (k < n) out.push_back(in[k]);
    if (static_cast<double>(out.size()) > cap)
      throw std::range_error("insertion channel: generated length exceeded 64*n/alpha cap");
  }
  return out;
}

}  // namespace detail

inline Trace apply_deletion(const BitString& x, double q, std::uint64_t seed) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("apply_deletion: q must be in [0,1)");
  Rng rng(seed);
  return Trace{detail::delete_bits(x.bits(), q, rng), seed};
}

inline Trace apply_substitution(const Trace& t, double lambda, std::uint64_t seed) {
  if (!(lambda >= 0.0 && lambda < 0.5))
    throw std::invalid_argument("apply_substitution: lambda must be in [0,1/2)");
  Rng rng(seed);
  return Trace{detail::substitute_bits(t.bits, lambda, rng), seed};
}

inline Trace apply_insertion(const BitString& x, double beta, std::uint64_t seed) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("apply_insertion: beta must be in [0,1)");
  Rng rng(seed);
  return Trace{detail::insert_bits(x.bits(), beta, rng), seed};
}

// Stages consume the previous stage's output, each with its own derived seed.
inline Trace apply_composed(const BitString& x, const ChannelSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<std::uint8_t> cur = x.bits();
  for (std::size_t i = 0; i < spec.stage_order.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    switch (spec.stage_order[i]) {
      case Stage::deletion: cur = detail::delete_bits(cur, spec.deletion_q, rng); break;
      case Stage::substitution:
        cur = detail::substitute_bits(std::move(cur), spec.substitution_lambda, rng);
        break;
      case Stage::insertion: cur = detail::insert_bits(cur, spec.insertion_beta, rng); break;
    }
  }
  return Trace{std::move(cur), seed};
}

struct TraceSet {
  std::vector<Trace> traces;
  ChannelSpec spec;
  std::size_t source_length = 0;
  std::uint64_t master_seed = 0;
};

// T independent channel outputs; trace t uses seed derive_seed(master_seed, t),
// so the result is identical no matter how generation is scheduled.
inline TraceSet sample_traces(const BitString& x, const ChannelSpec& spec, std::size_t T,
                              std::uint64_t master_seed, unsigned workers = 1) {
  if (T == 0) throw std::invalid_argument("sample_traces: T must be >= 1");
  spec.validate();
  TraceSet ts{std::vector<Trace>(T), spec, x.size(), master_seed};
  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t)
      ts.traces[t] = apply_composed(x, spec, derive_seed(master_seed, t));
  };
  if (workers <= 1 || T < 4096) {
    fill(0, T);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (T + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(w) * chunk, T);
      const std::size_t hi = std::min<std::size_t>(lo + chunk, T);
      if (lo < hi) pool.emplace_back(fill, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return ts;
}

// Trace file format: header then one trace per line as ASCII '0'/'1'.
//   # tracekit v1 n=<n> q=<q> lambda=<lambda> beta=<beta> seed=<s>
inline void write_trace_file(std::ostream& out, const TraceSet& ts) {
  out << "# tracekit v1 n=" << ts.source_length << " q=" << format_double(ts.spec.effective_q())
      << " lambda=" << format_double(ts.spec.effective_lambda())
      << " beta=" << format_double(ts.spec.effective_beta()) << " seed=" << ts.master_seed << "\n";
  for (const auto& t : ts.traces) {
    for (auto b : t.bits) out << static_cast<char>('0' + b);
    out << "\n";
  }
}

// Stage order is not recorded in the file; enabled stages are re-derived from
// nonzero parameters in the canonical order deletion, substitution, insertion.
inline TraceSet read_trace_file(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("trace file: missing header");
  std::size_t n = 0;
  double q = 0, lambda = 0, beta = 0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(), "# tracekit v1 n=%zu q=%lf lambda=%lf beta=%lf seed=%llu", &n,
                  &q, &lambda, &beta, &seed) != 5)
    throw std::invalid_argument("trace file: bad header: " + header);
  TraceSet ts;
  ts.source_length = n;
  ts.master_seed = seed;
  ts.spec.deletion_q = q;
  ts.spec.substitution_lambda = lambda;
  ts.spec.insertion_beta = beta;
  if (q > 0) ts.spec.stage_order.push_back(Stage::deletion);
  if (lambda > 0) ts.spec.stage_order.push_back(Stage::substitution);
  if (beta > 0) ts.spec.stage_order.push_back(Stage::insertion);
  if (ts.spec.stage_order.empty()) ts.spec.stage_order.push_back(Stage::deletion);
  std::string line;
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    Trace t;
    t.origin_seed = derive_seed(seed, idx++);
    t.bits.reserve(line.size());
    for (char c : line) {
      if (c != '0' && c != '1') throw std::invalid_argument("trace file: bad bit character");
      t.bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    ts.traces.push_back(std::move(t));
  }
  if (ts.traces.empty()) throw std::invalid_argument("trace file: no traces");
  return ts;
}

}  // namespace tracekit
