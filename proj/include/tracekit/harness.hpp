#pragma once
// Experiment orchestration: task dispatch, parameter sweeps with derived
// per-cell seeds, CSV outputs, and the append-only run log. This is the only
// module that owns threads; everything it calls is pure given its seeds.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tracekit/channels.hpp"
#include "tracekit/config.hpp"
#include "tracekit/csv.hpp"
#include "tracekit/hardpairs.hpp"
#include "tracekit/meanstats.hpp"
#include "tracekit/reconstruct.hpp"

namespace tracekit {

inline constexpr const char* kVersion = "1.0.0";

// TRACEKIT_WORKERS overrides the worker count; affects speed only, never
// results (every cell and trace carries its own derived seed).
inline unsigned worker_count() {
  if (const char* env = std::getenv("TRACEKIT_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

struct RunRecord {
  std::string config_hash;
  Task task = Task::simulate;
  std::map<std::string, double> metrics;
  double seconds = 0.0;
  std::string version = kVersion;
};

inline std::string metrics_to_string(const std::map<std::string, double>& m) {
  std::string s;
  for (const auto& [k, v] : m) {
    if (!s.empty()) s += ';';
    s += k + "=" + format_double(v);
  }
  return s;
}

// One line per run, written with a single append so concurrent runs interleave
// whole records only.
inline void append_run_record(const std::string& path, const RunRecord& r) {
  const bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::invalid_argument("cannot open run log: " + path);
  std::ostringstream line;
  if (fresh) line << kRunLogCsvHeader << "\n";
  line << r.config_hash << "," << task_name(r.task) << "," << format_double(r.seconds) << ","
       << r.version << "," << metrics_to_string(r.metrics) << "\n";
  out << line.str() << std::flush;
}

namespace detail {

inline BitString config_input_string(const ExperimentConfig& c) {
  if (!c.x_bits.empty()) return BitString::from_string(c.x_bits);
  Rng rng(derive_seed(c.seed, 0x78));
  return BitString::random(static_cast<std::size_t>(c.n), rng);
}

inline std::vector<Complex> sampled_w(std::size_t count, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Complex> ws(count);
  for (auto& w : ws) {
    const double r = radius * std::sqrt(rng.next_double());
    const double t = 2.0 * std::numbers::pi * rng.next_double();
    w = std::polar(r, t);
  }
  return ws;
}

// one reconstruction trial against a fresh random input, all seeds derived
inline bool unbeaten_trial(const UnbeatenReconstructor& engine, const ChannelSpec& spec,
                           std::size_t n, long long T, std::uint64_t trial_seed) {
  Rng rng(derive_seed(trial_seed, 0));
  const BitString x = BitString::random(n, rng);
  const TraceSet ts = sample_traces(x, spec, static_cast<std::size_t>(T), derive_seed(trial_seed, 1));
  const ReconstructionResult r = engine.reconstruct(ts);
  return !r.ambiguous && r.estimate == x;
}

inline bool bma_trial(const ChannelSpec& spec, std::size_t n, long long T,
                      std::uint64_t trial_seed) {
  Rng rng(derive_seed(trial_seed, 0));
  const BitString x = BitString::random(n, rng);
  const TraceSet ts = sample_traces(x, spec, static_cast<std::size_t>(T), derive_seed(trial_seed, 1));
  return bma_reconstruct(ts, n).estimate == x;
}

struct SweepCell {
  long long n;
  double q;
  long long T;
};

inline std::vector<SweepCell> sweep_grid(const ExperimentConfig& c) {
  std::vector<long long> ns = c.n_list.empty() ? std::vector<long long>{c.n} : c.n_list;
  std::vector<double> qs = c.q_list.empty() ? std::vector<double>{c.q} : c.q_list;
  std::vector<long long> Ts = c.T_list.empty() ? std::vector<long long>{c.T} : c.T_list;
  std::vector<SweepCell> cells;
  for (long long n : ns)
    for (double q : qs)
      for (long long T : Ts) cells.push_back({n, q, T});
  return cells;
}

}  // namespace detail

// Cartesian-product sweep; every cell gets its own derived seed so results
// are independent of scheduling. Refuses up front when the trial budget is
// exceeded.
inline std::vector<RunRecord> sweep(const ExperimentConfig& base, std::ostream& log = std::cout) {
  const auto cells = detail::sweep_grid(base);
  if (cells.empty()) throw std::invalid_argument("sweep: empty grid");
  const bool t90_mode = base.mode == "t90";
  if (!t90_mode && !base.mode.empty() && base.mode != "rate" && base.mode != "rate-bma")
    throw std::invalid_argument("sweep: unknown mode: " + base.mode);
  const long long probes_per_cell = t90_mode ? 40 : 1;
  const long long budget_needed =
      static_cast<long long>(cells.size()) * probes_per_cell * base.trials;
  if (budget_needed > base.budget)
    throw std::range_error("sweep: trial budget exceeded (" + std::to_string(budget_needed) +
                           " > " + std::to_string(base.budget) + ")");

  struct CellOut {
    detail::SweepCell cell;
    long long successes = 0;
    long long t90 = -1;
  };
  std::vector<CellOut> results(cells.size());

  auto run_cell = [&](std::size_t idx) {
    const auto& cell = cells[idx];
    const std::uint64_t cell_seed = derive_seed(base.seed, idx);
    ChannelSpec spec = base.channel();
    spec.deletion_q = cell.q;
    CellOut out{cell, 0, -1};
    const auto n = static_cast<std::size_t>(cell.n);
    if (t90_mode || base.mode.empty() || base.mode == "rate") {
      const UnbeatenReconstructor engine(enumerate_all_strings(n), spec);
      if (t90_mode) {
        // bisection for the smallest T reaching 90% success
        std::uint64_t probe = 0;
        auto rate_at = [&](long long T) {
          long long wins = 0;
          const std::uint64_t probe_seed = derive_seed(cell_seed, probe++);
          for (int t = 0; t < base.trials; ++t)
            wins += detail::unbeaten_trial(engine, spec, n, T, derive_seed(probe_seed, t));
          return static_cast<double>(wins) / base.trials;
        };
        long long T = 8;
        while (rate_at(T) < 0.9) {
          T *= 2;
          if (T > (1ll << 22)) break;
        }
        if (T <= (1ll << 22)) {
          long long lo = T / 2, hi = T;
          while (hi - lo > std::max<long long>(1, lo / 16)) {
            const long long mid = (lo + hi) / 2;
            if (rate_at(mid) >= 0.9)
              hi = mid;
            else
              lo = mid;
          }
          out.t90 = hi;
        }
      } else {
        for (int t = 0; t < base.trials; ++t)
          out.successes +=
              detail::unbeaten_trial(engine, spec, n, cell.T, derive_seed(cell_seed, t));
      }
    } else if (base.mode == "rate-bma") {
      for (int t = 0; t < base.trials; ++t)
        out.successes += detail::bma_trial(spec, n, cell.T, derive_seed(cell_seed, t));
    } else {
      throw std::invalid_argument("sweep: unknown mode: " + base.mode);
    }
    results[idx] = out;
  };

  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& th : pool) th.join();
  }

  std::ostringstream csv_text;
  std::vector<RunRecord> records;
  if (t90_mode) {
    CsvWriter csv(csv_text, kSweepT90CsvHeader);
    for (const auto& r : results) csv.row(r.cell.n, r.cell.q, base.trials, r.t90);
  } else {
    CsvWriter csv(csv_text, kSweepRateCsvHeader);
    for (const auto& r : results)
      csv.row(r.cell.n, r.cell.q, base.lambda, base.beta, r.cell.T, base.trials, r.successes,
              static_cast<double>(r.successes) / base.trials);
  }
  if (!base.out_path.empty()) {
    auto f = open_output_file(base.out_path);
    f << csv_text.str();
  }
  log << csv_text.str();

  for (std::size_t i = 0; i < results.size(); ++i) {
    RunRecord rec;
    rec.task = Task::sweep;
    rec.config_hash = base.hash();
    rec.metrics["cell"] = static_cast<double>(i);
    rec.metrics["n"] = static_cast<double>(results[i].cell.n);
    rec.metrics["q"] = results[i].cell.q;
    if (t90_mode)
      rec.metrics["T90"] = static_cast<double>(results[i].t90);
    else {
      rec.metrics["T"] = static_cast<double>(results[i].cell.T);
      rec.metrics["rate"] = static_cast<double>(results[i].successes) / base.trials;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace detail {

inline RunRecord run_simulate(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  const BitString x = config_input_string(c);
  const TraceSet ts =
      sample_traces(x, c.channel(), static_cast<std::size_t>(c.T), derive_seed(c.seed, 1));
  double total_len = 0;
  for (const auto& t : ts.traces) total_len += static_cast<double>(t.size());
  if (!c.out_path.empty()) {
    auto f = open_output_file(c.out_path);
    write_trace_file(f, ts);
  } else {
    write_trace_file(log, ts);
  }
  rec.metrics["traces"] = static_cast<double>(ts.traces.size());
  rec.metrics["mean_length"] = total_len / static_cast<double>(ts.traces.size());
  log << "simulate: n=" << x.size() << " T=" << c.T
      << " mean_length=" << format_double(rec.metrics["mean_length"]) << "\n";
  return rec;
}

inline RunRecord run_means(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  const BitString x = config_input_string(c);
  const ChannelSpec spec = c.channel();
  const MeanProfile exact = exact_channel_means(x, spec);
  const TraceSet ts = sample_traces(x, spec, static_cast<std::size_t>(c.T), derive_seed(c.seed, 1));
  const MeanProfile emp = empirical_means(ts, x.size());
  std::ostringstream csv_text;
  {
    CsvWriter csv(csv_text, kMeansCsvHeader);
    for (std::size_t j = 0; j < exact.horizon(); ++j) csv.row(j, exact.means[j], 0.0, "exact");
    for (std::size_t j = 0; j < emp.horizon(); ++j)
      csv.row(j, emp.means[j], emp.stderrs[j], "empirical");
  }
  if (!c.out_path.empty()) {
    auto f = open_output_file(c.out_path);
    f << csv_text.str();
  }
  double max_dev = 0;
  for (std::size_t j = 0; j < exact.horizon(); ++j)
    max_dev = std::max(max_dev, std::abs(exact.means[j] - emp.means[j]));
  rec.metrics["max_abs_deviation"] = max_dev;
  log << "means: n=" << x.size() << " T=" << c.T << " max_abs_deviation=" << format_double(max_dev)
      << "\n";
  return rec;
}

inline RunRecord run_verify_identity(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  const BitString x = config_input_string(c);
  const double p = 1.0 - c.q;
  const MeanProfile m = exact_deletion_means(x, c.q);
  const auto ws = sampled_w(50, 1.05, derive_seed(c.seed, 0x77));
  std::ostringstream csv_text;
  CsvWriter csv(csv_text, kIdentityCsvHeader);
  double max_residual = 0.0;
  for (const Complex w : ws) {
    const Complex lhs = gen_series_at_w(m, w);
    const Complex rhs = p * eval_poly(x, p * w + c.q);
    const double residual = std::abs(lhs - rhs);
    max_residual = std::max(max_residual, residual);
    csv.row(w.real(), w.imag(), lhs.real(), lhs.imag(), rhs.real(), rhs.imag(), residual);
  }
  if (!c.out_path.empty()) {
    auto f = open_output_file(c.out_path);
    f << csv_text.str();
  }
  rec.metrics["max_residual"] = max_residual;
  log << "verify-identity: n=" << x.size() << " q=" << format_double(c.q)
      << " max_residual=" << format_double(max_residual) << "\n";
  return rec;
}

inline RunRecord run_distinguish(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  if (c.x_bits.empty() || c.y_bits.empty())
    throw std::invalid_argument("distinguish: --x and --y are required");
  const BitString x = BitString::from_string(c.x_bits);
  const BitString y = BitString::from_string(c.y_bits);
  const ChannelSpec spec = c.channel();
  const IndexRule rule = c.threshold > 0 ? IndexRule::smallest_above_threshold : IndexRule::argmax;
  const PairTestPlan plan = select_index(x, y, spec, rule, c.threshold);
  const long long T = c.T > 0 ? c.T : chernoff_sample_size(plan.eta, 0, 0.05);
  std::ostringstream csv_text;
  CsvWriter csv(csv_text, kDistinguishCsvHeader);
  long long errors = 0;
  for (int r = 0; r < c.trials; ++r) {
    const bool truth_is_x = (r % 2) == 0;
    const BitString& truth = truth_is_x ? x : y;
    const TraceSet ts =
        sample_traces(truth, spec, static_cast<std::size_t>(T), derive_seed(c.seed, r));
    const double s = empirical_means(ts, x.size()).means[plan.j_star];
    const bool estimate_is_x = std::abs(s - plan.mean_x) <= std::abs(s - plan.mean_y);
    const bool correct = estimate_is_x == truth_is_x;
    errors += !correct;
    csv.row(r, truth_is_x ? "x" : "y", estimate_is_x ? "x" : "y", correct);
  }
  if (!c.out_path.empty()) {
    auto f = open_output_file(c.out_path);
    f << csv_text.str();
  }
  rec.metrics["j_star"] = static_cast<double>(plan.j_star);
  rec.metrics["eta"] = plan.eta;
  rec.metrics["T"] = static_cast<double>(T);
  rec.metrics["error_rate"] = static_cast<double>(errors) / c.trials;
  log << "distinguish: j_star=" << plan.j_star << " eta=" << format_double(plan.eta) << " T=" << T
      << " error_rate=" << format_double(rec.metrics["error_rate"]) << "\n";
  return rec;
}

inline RunRecord run_reconstruct(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  TraceSet ts;
  BitString truth;
  bool have_truth = false;
  if (!c.in_path.empty()) {
    std::ifstream in(c.in_path);
    if (!in) throw std::invalid_argument("cannot open trace file: " + c.in_path);
    ts = read_trace_file(in);
  } else {
    truth = config_input_string(c);
    have_truth = true;
    ts = sample_traces(truth, c.channel(), static_cast<std::size_t>(c.T), derive_seed(c.seed, 1));
  }
  const std::size_t n = ts.source_length;
  const std::string mode = c.mode.empty() ? "unbeaten" : c.mode;
  BitString estimate;
  if (mode == "unbeaten") {
    const UnbeatenReconstructor engine(enumerate_all_strings(n), ts.spec);
    const ReconstructionResult r = engine.reconstruct(ts);
    estimate = r.estimate;
    rec.metrics["ambiguous"] = r.ambiguous ? 1.0 : 0.0;
    rec.metrics["unbeaten_count"] = r.unbeaten_count;
  } else if (mode == "bma") {
    const BmaResult r = bma_reconstruct(ts, n);
    estimate = r.estimate;
    rec.metrics["exhausted_early"] = r.exhausted_early ? 1.0 : 0.0;
  } else if (mode == "meaninvert") {
    const MeanProfile emp = empirical_means(ts, n);
    const InversionResult r = invert_deletion_means(emp, ts.spec.effective_q());
    estimate = r.bits;
    rec.metrics["max_residual"] = r.max_residual;
  } else {
    throw std::invalid_argument("reconstruct: unknown mode: " + mode);
  }
  if (have_truth) rec.metrics["match"] = (estimate == truth) ? 1.0 : 0.0;
  log << "reconstruct: mode=" << mode << " estimate=" << estimate.to_string();
  if (have_truth) log << " match=" << (estimate == truth ? 1 : 0);
  log << "\n";
  return rec;
}

inline RunRecord run_weakbound(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  const int n = c.n;
  if (n < 1 || n > 10) throw std::invalid_argument("weakbound: need 1 <= n <= 10");
  const int L = static_cast<int>(c.arc_L);
  const auto samples = static_cast<std::size_t>(c.arc_samples);
  std::ostringstream csv_text;
  CsvWriter csv(csv_text, kWeakBoundCsvHeader);
  long long violations = 0, count = 0;
  const std::uint64_t total = pow3(n);
  std::vector<std::int8_t> coeffs(n, -1);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    bool nonzero = false;
    for (int k = 0; k < n; ++k) nonzero = nonzero || coeffs[k] != 0;
    if (nonzero) {
      const WeakBoundReport r = verify_weak_bound(SignedSeq(coeffs), L, samples);
      csv.row(r.n, r.L, r.max_on_arc, r.bound, r.consistent);
      violations += !r.consistent;
      ++count;
    }
    for (int k = 0; k < n; ++k) {
      if (++coeffs[k] <= 1) break;
      coeffs[k] = -1;
    }
  }
  if (!c.out_path.empty()) {
    auto f = open_output_file(c.out_path);
    f << csv_text.str();
  }
  rec.metrics["sequences"] = static_cast<double>(count);
  rec.metrics["violations"] = static_cast<double>(violations);
  log << "weakbound: n=" << n << " L=" << L << " sequences=" << count
      << " violations=" << violations << "\n";
  return rec;
}

inline RunRecord run_hardpair(const ExperimentConfig& c, std::ostream& log) {
  RunRecord rec;
  const SearchMode mode = c.mode == "anneal" ? SearchMode::anneal : SearchMode::exhaustive;
  const LittlewoodPoly Q = search_q(c.degree, mode, c.budget, c.seed, worker_count());
  const auto n = static_cast<std::size_t>(c.n);
  const HardPair pair = build_hard_pair(Q, n);
  const PerBitGap gap = per_bit_gap(pair, c.q);

  std::ostringstream coeff_text;
  for (std::size_t k = 0; k < Q.coeffs.size(); ++k)
    coeff_text << (k ? "," : "") << static_cast<int>(Q.coeffs[k]);
  log << "hardpair: degree=" << Q.degree() << " Q=[" << coeff_text.str()
      << "] sup01=" << format_double(Q.sup01) << " n=" << n << " m=" << pair.m
      << " max_gap=" << format_double(gap.max_abs) << " at j=" << gap.argmax << "\n";

  std::vector<long long> Ts = c.T_list.empty() ? std::vector<long long>{10, 100, 1000} : c.T_list;
  std::ostringstream tv_text;
  CsvWriter tv_csv(tv_text, kTvCsvHeader);
  for (long long T : Ts) {
    const MeanProfile mx = exact_deletion_means(pair.x, c.q);
    const MeanProfile my = exact_deletion_means(pair.y, c.q);
    double max_tv = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      max_tv = std::max(max_tv, exact_product_bernoulli_tv(mx.means[j], my.means[j], T));
    const double bound = tv_bound_per_bit(gap.max_abs, T);
    tv_csv.row(T, max_tv, bound);
    log << "  T=" << T << " max_tv=" << format_double(max_tv) << " bound=" << format_double(bound)
        << "\n";
  }

  if (!c.out_path.empty()) {
    auto gap_file = open_output_file(c.out_path + ".gap.csv");
    CsvWriter gap_csv(gap_file, kGapCsvHeader);
    for (std::size_t j = 0; j < gap.profile.horizon(); ++j) gap_csv.row(j, gap.profile.means[j]);
    auto tv_file = open_output_file(c.out_path + ".tv.csv");
    tv_file << tv_text.str();
  }
  rec.metrics["sup01"] = Q.sup01;
  rec.metrics["max_gap"] = gap.max_abs;
  rec.metrics["m"] = static_cast<double>(pair.m);
  return rec;
}

}  // namespace detail

inline RunRecord run_task(const ExperimentConfig& config, std::ostream& log = std::cout) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  switch (config.task) {
    case Task::simulate: rec = detail::run_simulate(config, log); break;
    case Task::means: rec = detail::run_means(config, log); break;
    case Task::verify_identity: rec = detail::run_verify_identity(config, log); break;
    case Task::distinguish: rec = detail::run_distinguish(config, log); break;
    case Task::reconstruct: rec = detail::run_reconstruct(config, log); break;
    case Task::weakbound: rec = detail::run_weakbound(config, log); break;
    case Task::hardpair: rec = detail::run_hardpair(config, log); break;
    case Task::sweep: {
      const auto records = sweep(config, log);
      rec.metrics["cells"] = static_cast<double>(records.size());
      for (std::size_t i = 0; i < records.size(); ++i)
        for (const auto& [k, v] : records[i].metrics)
          if (k != "cell") rec.metrics["cell" + std::to_string(i) + "_" + k] = v;
      break;
    }
  }
  rec.task = config.task;
  rec.config_hash = config.hash();
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace tracekit
