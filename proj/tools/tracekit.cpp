// tracekit command-line tool: channel simulation, mean profiles, identity
// checks, pairwise distinguishing, reconstruction, arc bounds, hard pairs,
// and parameter sweeps.
//
// Exit codes: 0 success, 2 usage error, 3 numerical/range error,
// 4 ambiguity or diagnostic failure.

#include <exception>
#include <tuple>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tracekit/tracekit.hpp"

namespace {

using tracekit::ExperimentConfig;
using tracekit::Task;

void add_common_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path,
                      std::string& log_path) {
  cmd->add_option("--config", config_path, "load a key=value config file first");
  cmd->add_option("--log", log_path, "append a run record to this CSV file");
  cmd->add_option("--n", cfg.n, "input string length");
  cmd->add_option("--q", cfg.q, "deletion probability, in [0,1)");
  cmd->add_option("--lambda", cfg.lambda, "substitution (bit flip) probability, in [0,1/2)");
  cmd->add_option("--beta", cfg.beta, "insertion parameter, in [0,1)");
  cmd->add_option("--stages", cfg.stages, "channel stage order, e.g. deletion,substitution");
  cmd->add_option("--T", cfg.T, "traces per experiment");
  cmd->add_option("--trials", cfg.trials, "number of trials");
  cmd->add_option("--seed", cfg.seed, "master seed");
  cmd->add_option("--mode", cfg.mode, "task-specific mode");
  cmd->add_option("--degree", cfg.degree, "polynomial degree (hardpair)");
  cmd->add_option("--L", cfg.arc_L, "arc parameter L (weakbound)");
  cmd->add_option("--samples", cfg.arc_samples, "arc grid sample count");
  cmd->add_option("--budget", cfg.budget, "sweep trial budget / anneal proposal budget");
  cmd->add_option("--threshold", cfg.threshold, "index rule: smallest j with gap above this");
  cmd->add_option("--x", cfg.x_bits, "explicit input string of '0'/'1'");
  cmd->add_option("--y", cfg.y_bits, "second string (distinguish)");
  cmd->add_option("--in", cfg.in_path, "input trace file");
  cmd->add_option("--out", cfg.out_path, "output path (CSV or trace file)");
  cmd->add_option("--n-list", [&cfg](const std::vector<std::string>& v) {
    cfg.n_list = ExperimentConfig::parse_ll_list(v.at(0));
    return true;
  }, "sweep n values, e.g. 6..14 or 6,8,10");
  cmd->add_option("--q-list", [&cfg](const std::vector<std::string>& v) {
    cfg.q_list = ExperimentConfig::parse_d_list(v.at(0));
    return true;
  }, "sweep q values, e.g. 0.1,0.3,0.5");
  cmd->add_option("--T-list", [&cfg](const std::vector<std::string>& v) {
    cfg.T_list = ExperimentConfig::parse_ll_list(v.at(0));
    return true;
  }, "sweep T values, e.g. 100,1000 or 8..64");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace reconstruction laboratory"};
  app.require_subcommand(0, 1);

  ExperimentConfig cfg;
  std::string config_path;
  std::string log_path;
  app.add_option("--config", config_path, "load a key=value config file first");
  app.add_option("--log", log_path, "append a run record to this CSV file");

  const std::tuple<const char*, Task, const char*> tasks[] = {
      {"simulate", Task::simulate, "generate traces and write a trace file"},
      {"means", Task::means, "exact and empirical per-position mean profiles"},
      {"verify-identity", Task::verify_identity,
       "residuals of the deletion mean identity at sampled points"},
      {"distinguish", Task::distinguish, "pairwise single-index test between two strings"},
      {"reconstruct", Task::reconstruct, "recover a string (unbeaten | bma | meaninvert)"},
      {"weakbound", Task::weakbound, "arc lower bound over all nonzero sign sequences"},
      {"hardpair", Task::hardpair, "search a small polynomial and build the hard pair"},
      {"sweep", Task::sweep, "parameter sweeps (rate | rate-bma | t90)"},
  };
  for (const auto& [name, task, blurb] : tasks) {
    CLI::App* cmd = app.add_subcommand(name, blurb);
    add_common_flags(cmd, cfg, config_path, log_path);
    cmd->callback([&cfg, task = task] { cfg.task = task; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const bool task_from_cli = !app.get_subcommands().empty();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      ExperimentConfig from_file = ExperimentConfig::parse(text);
      // a subcommand on the command line wins over the file's task
      if (task_from_cli) from_file.task = cfg.task;
      cfg = from_file;
      app.clear();
      app.parse(argc, argv);
    }
    if (!task_from_cli && config_path.empty()) {
      std::cerr << app.help() << std::endl;
      return 2;
    }

    const tracekit::RunRecord rec = tracekit::run_task(cfg, std::cout);
    if (!log_path.empty()) tracekit::append_run_record(log_path, rec);

    // diagnostic outcomes surface through the exit code
    const auto it_amb = rec.metrics.find("ambiguous");
    if (it_amb != rec.metrics.end() && it_amb->second > 0) return 4;
    const auto it_exh = rec.metrics.find("exhausted_early");
    if (it_exh != rec.metrics.end() && it_exh->second > 0) return 4;
    return 0;
  } catch (const tracekit::InversionUnstableError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  } catch (const std::range_error& e) {
    std::cerr << "range error: " << e.what() << std::endl;
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
