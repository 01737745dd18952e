#pragma once
// Experiment configuration: every run is fully described by one of these, and
// the key=value serialization round-trips losslessly so runs can be replayed.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracekit/channels.hpp"
#include "tracekit/text.hpp"

namespace tracekit {

enum class Task { simulate, means, verify_identity, distinguish, reconstruct, weakbound, hardpair, sweep };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::simulate: return "simulate";
    case Task::means: return "means";
    case Task::verify_identity: return "verify-identity";
    case Task::distinguish: return "distinguish";
    case Task::reconstruct: return "reconstruct";
    case Task::weakbound: return "weakbound";
    case Task::hardpair: return "hardpair";
    case Task::sweep: return "sweep";
  }
  return "?";
}

inline Task task_from_name(const std::string& s) {
  for (Task t : {Task::simulate, Task::means, Task::verify_identity, Task::distinguish,
                 Task::reconstruct, Task::weakbound, Task::hardpair, Task::sweep})
    if (s == task_name(t)) return t;
  throw std::invalid_argument("unknown task: " + s);
}

struct ExperimentConfig {
  Task task = Task::simulate;
  int n = 16;
  double q = 0.5;
  double lambda = 0.0;
  double beta = 0.0;
  std::string stages = "deletion";  // comma-joined stage order
  long long T = 1000;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string mode = "";     // unbeaten|bma|meaninvert, exhaustive|anneal, rate|t90
  int degree = 8;
  double arc_L = 3.0;
  long long arc_samples = 4096;
  long long budget = 200000;  // sweep trial budget; anneal proposal budget
  double threshold = 0.0;     // 0 = argmax index rule; else smallest-above-threshold
  std::string x_bits = "";
  std::string y_bits = "";
  std::string in_path = "";
  std::string out_path = "";
  std::vector<long long> n_list;
  std::vector<double> q_list;
  std::vector<long long> T_list;

  ChannelSpec channel() const {
    ChannelSpec spec;
    spec.deletion_q = q;
    spec.substitution_lambda = lambda;
    spec.insertion_beta = beta;
    for (const std::string& s : split(stages, ',')) {
      if (s.empty()) continue;
      if (s == "deletion") spec.stage_order.push_back(Stage::deletion);
      else if (s == "substitution") spec.stage_order.push_back(Stage::substitution);
      else if (s == "insertion") spec.stage_order.push_back(Stage::insertion);
      else throw std::invalid_argument("unknown stage: " + s);
    }
    spec.validate();
    return spec;
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "task=" << task_name(task) << "\n";
    out << "n=" << n << "\n";
    out << "q=" << format_double(q) << "\n";
    out << "lambda=" << format_double(lambda) << "\n";
    out << "beta=" << format_double(beta) << "\n";
    out << "stages=" << stages << "\n";
    out << "T=" << T << "\n";
    out << "trials=" << trials << "\n";
    out << "seed=" << seed << "\n";
    out << "mode=" << mode << "\n";
    out << "degree=" << degree << "\n";
    out << "arc_L=" << format_double(arc_L) << "\n";
    out << "arc_samples=" << arc_samples << "\n";
    out << "budget=" << budget << "\n";
    out << "threshold=" << format_double(threshold) << "\n";
    out << "x=" << x_bits << "\n";
    out << "y=" << y_bits << "\n";
    out << "in=" << in_path << "\n";
    out << "out=" << out_path << "\n";
    out << "n_list=" << join_ll(n_list) << "\n";
    out << "q_list=" << join_d(q_list) << "\n";
    out << "T_list=" << join_ll(T_list) << "\n";
    return out.str();
  }

  static ExperimentConfig parse(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value: " + line);
      const std::string key = line.substr(0, eq);
      const std::string val = line.substr(eq + 1);
      if (key == "task") c.task = task_from_name(val);
      else if (key == "n") c.n = std::stoi(val);
      else if (key == "q") c.q = std::stod(val);
      else if (key == "lambda") c.lambda = std::stod(val);
      else if (key == "beta") c.beta = std::stod(val);
      else if (key == "stages") c.stages = val;
      else if (key == "T") c.T = std::stoll(val);
      else if (key == "trials") c.trials = std::stoi(val);
      else if (key == "seed") c.seed = std::stoull(val);
      else if (key == "mode") c.mode = val;
      else if (key == "degree") c.degree = std::stoi(val);
      else if (key == "arc_L") c.arc_L = std::stod(val);
      else if (key == "arc_samples") c.arc_samples = std::stoll(val);
      else if (key == "budget") c.budget = std::stoll(val);
      else if (key == "threshold") c.threshold = std::stod(val);
      else if (key == "x") c.x_bits = val;
      else if (key == "y") c.y_bits = val;
      else if (key == "in") c.in_path = val;
      else if (key == "out") c.out_path = val;
      else if (key == "n_list") c.n_list = parse_ll_list(val);
      else if (key == "q_list") c.q_list = parse_d_list(val);
      else if (key == "T_list") c.T_list = parse_ll_list(val);
      else throw std::invalid_argument("config: unknown key: " + key);
    }
    return c;
  }

  std::string hash() const { return to_hex(fnv1a64(serialize())); }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.serialize() == b.serialize();
  }

  // list syntax: comma-separated values, "a..b" ranges allowed for integers
  static std::vector<long long> parse_ll_list(const std::string& s) {
    std::vector<long long> out;
    if (s.empty()) return out;
    for (const std::string& part : split(s, ',')) {
      const auto dots = part.find("..");
      if (dots != std::string::npos) {
        const long long lo = std::stoll(part.substr(0, dots));
        const long long hi = std::stoll(part.substr(dots + 2));
        for (long long v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoll(part));
      }
    }
    return out;
  }

  static std::vector<double> parse_d_list(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const std::string& part : split(s, ',')) out.push_back(std::stod(part));
    return out;
  }

 private:
  static std::string join_ll(const std::vector<long long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  }
  static std::string join_d(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
  }
};

}  // namespace tracekit
