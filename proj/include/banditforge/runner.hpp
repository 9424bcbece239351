#pragma once

// Parallel seeded execution and result serialisation. Trials are independent;
// a bounded worker pool fills an index-addressed result table, so outputs are
// byte-identical for any worker count. Files are written via temp + rename.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditforge/analysis.hpp"
#include "banditforge/config.hpp"
#include "banditforge/env.hpp"

namespace banditforge {

// θ* materialisation for the random case is seeded from the master seed, so
// an experiment's instance is a pure function of its config.
BanditInstance instance_from_config(const InstanceSpec& spec,
                                    std::uint64_t master_seed);

struct BatchResult {
  // slot i corresponds to trial index i; empty = that trial failed
  std::vector<std::optional<TrialTrace>> traces;
  std::vector<std::pair<int, std::string>> failures;

  std::vector<TrialTrace> completed() const;
};

BatchResult run_batch(const BanditInstance& instance, const AgentConfig& config,
                      std::int64_t horizon, std::uint64_t master_seed,
                      int trials, int workers, Diagnostics diagnostics = {});

// 17-significant-digit decimal, round-trip exact.
std::string format_g17(double x);

// Serialises one trace in the aggregate-CSV row format
// (trial,t,regret,cum_regret,beta,coverage,epl_term,p_opt).
std::string trace_to_csv(const TrialTrace& trace, int trial_index,
                         bool with_header);

struct CsvRow {
  int trial = 0;
  std::int64_t t = 0;
  double regret = 0.0;
  double cum_regret = 0.0;
  double beta = 0.0;
  bool coverage = false;
  double epl_term = 0.0;
  std::optional<double> p_opt;
};

std::string csv_header();
std::string csv_row_to_string(const CsvRow& row);
CsvRow parse_csv_row(const std::string& line);
std::vector<CsvRow> read_aggregate_csv(const std::string& path);

void write_file_atomic(const std::string& path, const std::string& contents);

// Executes all agents of the config; writes per-trial traces, aggregate.csv
// and summary.txt per agent under run.out_dir. Returns a process exit status
// (0 ok, 2 I/O failure, 3 too many trial failures).
int run_experiment(const ExperimentConfig& config);

// Sweeps horizon checkpoints and dimensions per config.scale; writes per-d
// aggregates plus a summary with the fitted exponents.
int run_scale(const ExperimentConfig& config);

int resolve_workers(int from_config_or_flag);

}  // namespace banditforge
