#include "banditforge/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace banditforge {

namespace {
constexpr std::uint64_t kTrialSalt = 0x7121A1ULL;
constexpr std::uint64_t kThetaSalt = 0x7E7AULL;
}  // namespace

BanditInstance instance_from_config(const InstanceSpec& spec,
                                    std::uint64_t master_seed) {
  const std::size_t d = static_cast<std::size_t>(spec.d);
  Vec theta;
  if (spec.theta.random) {
    RngStream rng(derive_seed(master_seed, 0, kThetaSalt));
    theta = rng.unit_vec(d);
    for (auto& x : theta) x *= spec.theta.norm;
  } else {
    theta = spec.theta.explicit_value;
  }
  return BanditInstance::make(std::move(theta), spec.set.build(d), spec.S,
                              spec.noise, spec.R);
}

std::vector<TrialTrace> BatchResult::completed() const {
  std::vector<TrialTrace> out;
  out.reserve(traces.size());
  for (const auto& t : traces)
    if (t.has_value()) out.push_back(*t);
  return out;
}

BatchResult run_batch(const BanditInstance& instance, const AgentConfig& config,
                      std::int64_t horizon, std::uint64_t master_seed,
                      int trials, int workers, Diagnostics diagnostics) {
  if (trials < 1) throw Error("run_batch: trials must be positive");
  BatchResult out;
  out.traces.resize(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));

  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= trials) return;
      const std::uint64_t seed =
          derive_seed(master_seed, static_cast<std::uint64_t>(i), kTrialSalt);
      try {
        out.traces[static_cast<std::size_t>(i)] =
            run_trial(instance, config, horizon, seed, diagnostics);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };

  const int n_threads = std::max(1, std::min(workers, trials));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  for (int i = 0; i < trials; ++i) {
    if (!out.traces[static_cast<std::size_t>(i)].has_value())
      out.failures.emplace_back(i, errors[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_header() {
  return "trial,t,regret,cum_regret,beta,coverage,epl_term,p_opt";
}

std::string csv_row_to_string(const CsvRow& row) {
  std::string s;
  s += std::to_string(row.trial);
  s += ',';
  s += std::to_string(row.t);
  s += ',';
  s += format_g17(row.regret);
  s += ',';
  s += format_g17(row.cum_regret);
  s += ',';
  s += format_g17(row.beta);
  s += ',';
  s += row.coverage ? '1' : '0';
  s += ',';
  s += format_g17(row.epl_term);
  s += ',';
  if (row.p_opt.has_value()) s += format_g17(*row.p_opt);
  return s;
}

CsvRow parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 8) throw Error("csv row: expected 8 fields");

  auto to_d = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw Error("csv row: bad number '" + s + "'");
    return v;
  };
  CsvRow row;
  row.trial = static_cast<int>(to_d(fields[0]));
  row.t = static_cast<std::int64_t>(to_d(fields[1]));
  row.regret = to_d(fields[2]);
  row.cum_regret = to_d(fields[3]);
  row.beta = to_d(fields[4]);
  row.coverage = fields[5] == "1";
  row.epl_term = to_d(fields[6]);
  if (!fields[7].empty()) row.p_opt = to_d(fields[7]);
  return row;
}

std::string trace_to_csv(const TrialTrace& trace, int trial_index,
                         bool with_header) {
  std::string s;
  if (with_header) {
    s += csv_header();
    s += '\n';
  }
  double cum = 0.0;
  for (const auto& rec : trace.records) {
    cum += rec.r;
    CsvRow row;
    row.trial = trial_index;
    row.t = rec.t;
    row.regret = rec.r;
    row.cum_regret = cum;
    row.beta = rec.beta;
    row.coverage = rec.coverage;
    row.epl_term = rec.epl_term;
    row.p_opt = rec.p_opt;
    s += csv_row_to_string(row);
    s += '\n';
  }
  return s;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("rename failed for " + path + ": " + ec.message());
}

std::vector<CsvRow> read_aggregate_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw Error(path + ": empty file");
  if (line != csv_header()) throw Error(path + ": unexpected header");
  std::vector<CsvRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line));
  }
  return rows;
}

int resolve_workers(int from_config_or_flag) {
  if (from_config_or_flag > 0) return from_config_or_flag;
  if (const char* env = std::getenv("BANDITFORGE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

std::string instance_description(const BanditInstance& instance,
                                 const InstanceSpec& spec) {
  std::ostringstream os;
  os << "d = " << instance.set.dim() << "\n";
  os << "action_set = ";
  switch (instance.set.kind()) {
    case SetKind::L2Ball: os << "l2ball"; break;
    case SetKind::LqBall: os << "lqball:" << instance.set.q(); break;
    case SetKind::Finite: os << "finite(" << instance.set.points().size()
                             << " points)"; break;
    case SetKind::Transformed: os << "transformed"; break;
  }
  os << "\n";
  os << "theta_star =";
  for (double x : instance.theta_star) os << ' ' << format_g17(x);
  os << "\n";
  os << "S = " << spec.S << "\n";
  os << "R = " << spec.R << "\n";
  os << "noise = " << (spec.noise == NoiseKind::Gaussian ? "gaussian" : "uniform")
     << "\n";
  return os.str();
}

AgentConfig wire_agent(const AgentSpec& agent, const InstanceSpec& inst) {
  AgentConfig cfg = agent.config;
  cfg.R = inst.R;
  cfg.S = inst.S;
  return cfg;
}

std::vector<std::int64_t> summary_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> cps;
  for (std::int64_t cp = horizon; cp >= 8 && cps.size() < 6; cp /= 2)
    cps.push_back(cp);
  std::reverse(cps.begin(), cps.end());
  return cps;
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
  const auto& run = config.run;
  const int workers = resolve_workers(run.workers);
  const Diagnostics diag =
      run.diagnostics ? Diagnostics::all() : Diagnostics{};

  BanditInstance instance = instance_from_config(config.instance, run.master_seed);

  std::ostringstream summary;
  summary << "banditforge run summary\n";
  summary << "=======================\n\n";
  summary << instance_description(instance, config.instance);
  summary << "horizon = " << run.horizon << "\n";
  summary << "trials = " << run.trials << "\n";
  summary << "master_seed = " << run.master_seed << "\n";
  summary << "diagnostics = " << (run.diagnostics ? "on" : "off") << "\n";

  try {
    fs::create_directories(run.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: cannot create %s: %s\n",
                 run.out_dir.c_str(), e.what());
    return 2;
  }

  bool too_many_failures = false;
  for (const auto& agent : config.agents) {
    const AgentConfig cfg = wire_agent(agent, config.instance);
    const fs::path agent_dir = fs::path(run.out_dir) / agent.name;

    BatchResult batch;
    try {
      batch = run_batch(instance, cfg, run.horizon, run.master_seed, run.trials,
                        workers, diag);
    } catch (const Error& e) {
      std::fprintf(stderr, "banditforge: agent %s: %s\n", agent.name.c_str(),
                   e.what());
      return 1;
    }

    summary << "\n[agent " << agent.name << "]\n";
    summary << "kind = " << cfg.kind_name() << "\n";
    summary << "lambda = " << cfg.lambda << "\n";
    summary << "delta = " << cfg.delta << "\n";
    summary << "failed_trials = " << batch.failures.size() << "\n";
    for (const auto& [idx, msg] : batch.failures)
      summary << "failure " << idx << " = " << msg << "\n";
    if (static_cast<double>(batch.failures.size()) >=
        0.05 * static_cast<double>(run.trials)) {
      summary << "status = aborted (failure rate >= 5%)\n";
      too_many_failures = true;
      continue;
    }

    try {
      fs::create_directories(agent_dir);
      std::string agg;
      agg += csv_header();
      agg += '\n';
      for (std::size_t i = 0; i < batch.traces.size(); ++i) {
        if (!batch.traces[i].has_value()) continue;
        const std::string body =
            trace_to_csv(*batch.traces[i], static_cast<int>(i), false);
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%04zu.csv", i);
        write_file_atomic((agent_dir / name).string(),
                          csv_header() + "\n" + body);
        agg += body;
      }
      write_file_atomic((agent_dir / "aggregate.csv").string(), agg);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "banditforge: writing %s failed: %s\n",
                   agent_dir.string().c_str(), e.what());
      return 2;
    }

    const std::vector<TrialTrace> traces = batch.completed();
    if (!traces.empty() && run.horizon > 0) {
      const AggregateCurves curves = aggregate(traces);
      const std::size_t last = curves.mean.size() - 1;
      summary << "final_regret_mean = " << format_g17(curves.mean[last]) << "\n";
      summary << "final_regret_se = " << format_g17(curves.se[last]) << "\n";
      summary << "final_regret_q10 = " << format_g17(curves.q10[last]) << "\n";
      summary << "final_regret_q90 = " << format_g17(curves.q90[last]) << "\n";

      std::size_t covered = 0;
      for (const auto& tr : traces) {
        bool all = true;
        for (const auto& rec : tr.records) all = all && rec.coverage;
        covered += all ? 1 : 0;
      }
      summary << "coverage_fraction = "
              << format_g17(static_cast<double>(covered) /
                            static_cast<double>(traces.size()))
              << "\n";

      const auto cps = summary_checkpoints(run.horizon);
      if (cps.size() >= 2 && traces.size() >= 2) {
        try {
          const ScalingFit fit = slope_fit(traces, cps);
          summary << "slope = " << format_g17(fit.slope) << "\n";
          summary << "slope_r_squared = " << format_g17(fit.r_squared) << "\n";
        } catch (const Error&) {
          summary << "slope = n/a\n";
        }
      }
    }
  }

  try {
    write_file_atomic((fs::path(run.out_dir) / "summary.txt").string(),
                      summary.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: writing summary failed: %s\n", e.what());
    return 2;
  }
  return too_many_failures ? 3 : 0;
}

int run_scale(const ExperimentConfig& config) {
  if (!config.scale.has_value()) {
    std::fprintf(stderr, "banditforge: scale requires a [scale] section\n");
    return 1;
  }
  const ScaleSpec& sc = *config.scale;
  const auto& run = config.run;
  const int workers = resolve_workers(run.workers);
  const AgentSpec& agent = config.agents.front();

  std::int64_t horizon = sc.dim_checkpoint;
  for (std::int64_t cp : sc.checkpoints) horizon = std::max(horizon, cp);

  try {
    fs::create_directories(run.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: cannot create %s: %s\n",
                 run.out_dir.c_str(), e.what());
    return 2;
  }

  std::ostringstream summary;
  summary << "banditforge scale summary\n";
  summary << "=========================\n\n";
  summary << "agent = " << agent.name << "\n";
  summary << "trials_per_d = " << sc.trials << "\n";
  summary << "horizon = " << horizon << "\n";

  if (config.instance.set.kind == SetKind::Finite) {
    std::fprintf(stderr,
                 "banditforge: scale sweeps d; finite point sets have a fixed "
                 "dimension\n");
    return 1;
  }

  std::vector<std::pair<int, double>> dim_points;
  for (int d : sc.d_values) {
    InstanceSpec inst = config.instance;
    inst.d = d;
    if (!inst.theta.random) {
      std::fprintf(stderr,
                   "banditforge: scale sweeps d and needs theta_star = random\n");
      return 1;
    }
    BanditInstance instance =
        instance_from_config(inst, derive_seed(run.master_seed, d));
    const AgentConfig cfg = wire_agent(agent, inst);

    BatchResult batch;
    try {
      batch = run_batch(instance, cfg, horizon,
                        derive_seed(run.master_seed, d), sc.trials, workers);
    } catch (const Error& e) {
      std::fprintf(stderr, "banditforge: d=%d: %s\n", d, e.what());
      return 1;
    }
    const std::vector<TrialTrace> traces = batch.completed();
    if (traces.size() < 2) {
      std::fprintf(stderr, "banditforge: d=%d: too many failed trials\n", d);
      return 3;
    }

    summary << "\n[d " << d << "]\n";
    summary << "failed_trials = " << batch.failures.size() << "\n";
    try {
      const ScalingFit fit = slope_fit(traces, sc.checkpoints);
      summary << "slope = " << format_g17(fit.slope) << "\n";
      summary << "slope_r_squared = " << format_g17(fit.r_squared) << "\n";
      for (const auto& pt : fit.grid)
        summary << "regret_at_" << pt.n << " = " << format_g17(pt.mean)
                << " (se " << format_g17(pt.se) << ")\n";
    } catch (const Error& e) {
      summary << "slope = n/a (" << e.what() << ")\n";
    }

    double mean_at_cp = 0.0;
    for (const auto& tr : traces) {
      double cum = 0.0;
      for (std::int64_t t = 0; t < sc.dim_checkpoint; ++t)
        cum += tr.records[static_cast<std::size_t>(t)].r;
      mean_at_cp += cum;
    }
    mean_at_cp /= static_cast<double>(traces.size());
    dim_points.emplace_back(d, mean_at_cp);
    summary << "regret_at_dim_checkpoint = " << format_g17(mean_at_cp) << "\n";

    try {
      std::string agg;
      agg += csv_header();
      agg += '\n';
      for (std::size_t i = 0; i < batch.traces.size(); ++i) {
        if (!batch.traces[i].has_value()) continue;
        agg += trace_to_csv(*batch.traces[i], static_cast<int>(i), false);
      }
      char name[32];
      std::snprintf(name, sizeof(name), "aggregate_d%d.csv", d);
      write_file_atomic((fs::path(run.out_dir) / name).string(), agg);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "banditforge: writing aggregate failed: %s\n",
                   e.what());
      return 2;
    }
  }

  if (dim_points.size() >= 3) {
    try {
      summary << "\ndimension_exponent = "
              << format_g17(dimension_fit(dim_points)) << "\n";
    } catch (const Error& e) {
      summary << "\ndimension_exponent = n/a (" << e.what() << ")\n";
    }
  }

  try {
    write_file_atomic((fs::path(run.out_dir) / "scale_summary.txt").string(),
                      summary.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: writing summary failed: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace banditforge
