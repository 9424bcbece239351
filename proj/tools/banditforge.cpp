// banditforge CLI: seeded linear-bandit experiments.
//
//   banditforge run    --config cfg.txt [--out DIR] [--workers N] [--seed U64]
//                      [--diagnostics]
//   banditforge scale  --config cfg.txt [...]        sweep n and d
//   banditforge check  [--out DIR] [--seed U64]      moment audits, lemma
//                                                    validators, modulus probes
//   banditforge report --in DIR [--checkpoints ...]  refit stored aggregates

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "banditforge/analysis.hpp"
#include "banditforge/kernels.hpp"
#include "banditforge/runner.hpp"

namespace bf = banditforge;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool diagnostics = false;
};

int load_config(const CommonOpts& opts, bf::ExperimentConfig& cfg) {
  bf::ParseResult parsed = bf::parse_config_file(opts.config_path);
  if (!parsed.ok()) {
    std::fprintf(stderr, "banditforge: config errors:\n");
    for (const auto& e : parsed.errors)
      std::fprintf(stderr, "  %s: %s\n", e.path.c_str(), e.message.c_str());
    return 1;
  }
  cfg = std::move(*parsed.config);
  if (!opts.out_dir.empty()) cfg.run.out_dir = opts.out_dir;
  if (opts.workers > 0) cfg.run.workers = opts.workers;
  if (opts.seed_set) cfg.run.master_seed = opts.seed;
  if (opts.diagnostics) cfg.run.diagnostics = true;
  return 0;
}

int cmd_run(const CommonOpts& opts) {
  bf::ExperimentConfig cfg;
  if (int rc = load_config(opts, cfg); rc != 0) return rc;
  return bf::run_experiment(cfg);
}

int cmd_scale(const CommonOpts& opts) {
  bf::ExperimentConfig cfg;
  if (int rc = load_config(opts, cfg); rc != 0) return rc;
  return bf::run_scale(cfg);
}

int cmd_check(const std::string& out_dir, std::uint64_t seed) {
  std::ostringstream s;
  s << "banditforge check summary\n";
  s << "=========================\n";
  s << "kernel_lane = " << bf::kern::active().name << "\n";

  // Directional moment audits.
  {
    bf::RngStream rng(bf::derive_seed(seed, 1));
    const auto g = bf::moment_report(bf::PerturbationSpec::standard_gaussian(),
                                     4, 100000, 16, rng);
    s << "\n[moments gaussian d=4]\n";
    s << "second_min = " << bf::format_g17(g.second_min) << "\n";
    s << "second_max = " << bf::format_g17(g.second_max) << "\n";
    s << "fourth_max = " << bf::format_g17(g.fourth_max) << "\n";
    s << "pass = " << (g.pass ? "true" : "false") << "\n";

    const auto u = bf::moment_report(bf::PerturbationSpec::uniform_sphere(), 4,
                                     100000, 16, rng);
    s << "\n[moments sphere d=4]\n";
    s << "second_min = " << bf::format_g17(u.second_min) << "\n";
    s << "second_max = " << bf::format_g17(u.second_max) << "\n";
    s << "fourth_max = " << bf::format_g17(u.fourth_max) << "\n";
    s << "expected_fourth = " << bf::format_g17(3.0 * 4 / 6.0) << "\n";
    s << "pass = " << (u.pass ? "true" : "false") << "\n";
  }

  // Concentration-lemma validators.
  for (double delta : {0.05, 0.2}) {
    bf::RngStream rng(bf::derive_seed(seed, 2));
    const double mds = bf::mds_bound_mc(bf::rademacher_gen(1.0), 1.0, 1000,
                                        10000, delta, rng);
    const double nn = bf::nonneg_bound_mc(bf::bernoulli_gen(0.3), 1.0, 1000,
                                          10000, delta, rng);
    s << "\n[validators delta=" << delta << "]\n";
    s << "mds_violation_rate = " << bf::format_g17(mds) << "\n";
    s << "nonneg_violation_rate = " << bf::format_g17(nn) << "\n";
    s << "budget = " << bf::format_g17(delta) << "\n";
  }

  // Convexity modulus probes for the shipped q values.
  s << "\n[convexity probes]\n";
  for (double q : {1.5, 2.0, 3.0, 4.0}) {
    bf::RngStream rng(bf::derive_seed(seed, 3));
    const double p = q / (q - 1.0);
    const auto set = bf::ActionSet::lq_ball(2, q);
    const auto norm =
        q == 2.0 ? bf::NormSpec::euclidean() : bf::NormSpec::lp(p);
    const auto probe = bf::convexity_probe(set, norm, 10000, rng);
    const double m = q >= 2.0 ? p - 1.0 : 1.0;
    const double M = q >= 2.0 ? 1.0 : p - 1.0;
    s << "q=" << q << " ratio_min = " << bf::format_g17(probe.ratio_min)
      << " ratio_max = " << bf::format_g17(probe.ratio_max) << " bracket = ["
      << bf::format_g17(m) << ", " << bf::format_g17(M) << "]\n";
  }

  const std::string text = s.str();
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    try {
      std::filesystem::create_directories(out_dir);
      bf::write_file_atomic(
          (std::filesystem::path(out_dir) / "check_summary.txt").string(), text);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "banditforge: %s\n", e.what());
      return 2;
    }
  }
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& checkpoints_arg) {
  namespace fs = std::filesystem;
  std::vector<fs::path> aggregates;
  try {
    for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
      if (entry.is_regular_file() &&
          entry.path().filename().string().rfind("aggregate", 0) == 0 &&
          entry.path().extension() == ".csv")
        aggregates.push_back(entry.path());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: %s\n", e.what());
    return 2;
  }
  if (aggregates.empty()) {
    std::fprintf(stderr, "banditforge: no aggregate CSVs under %s\n",
                 in_dir.c_str());
    return 1;
  }
  std::sort(aggregates.begin(), aggregates.end());

  for (const auto& path : aggregates) {
    std::vector<bf::CsvRow> rows;
    try {
      rows = bf::read_aggregate_csv(path.string());
    } catch (const bf::Error& e) {
      std::fprintf(stderr, "banditforge: %s\n", e.what());
      return 1;
    }
    // Regroup rows into per-trial cumulative curves.
    std::map<int, std::vector<double>> cum_by_trial;
    for (const auto& row : rows)
      cum_by_trial[row.trial].push_back(row.cum_regret);
    if (cum_by_trial.empty()) {
      std::printf("%s: empty\n", path.string().c_str());
      continue;
    }
    const std::size_t horizon = cum_by_trial.begin()->second.size();

    std::vector<std::int64_t> cps;
    if (!checkpoints_arg.empty()) {
      std::istringstream is(checkpoints_arg);
      std::string part;
      while (std::getline(is, part, ','))
        cps.push_back(std::strtoll(part.c_str(), nullptr, 10));
    } else {
      for (std::int64_t cp = static_cast<std::int64_t>(horizon); cp >= 8;
           cp /= 2)
        cps.push_back(cp);
      std::sort(cps.begin(), cps.end());
    }

    std::printf("%s\n", path.string().c_str());
    std::printf("  trials = %zu, horizon = %zu\n", cum_by_trial.size(), horizon);
    if (cps.size() >= 2 && cum_by_trial.size() >= 2) {
      std::vector<double> xs, ys;
      for (std::int64_t cp : cps) {
        if (cp < 1 || static_cast<std::size_t>(cp) > horizon) continue;
        double mean = 0.0;
        for (const auto& [trial, curve] : cum_by_trial)
          mean += curve[static_cast<std::size_t>(cp - 1)];
        mean /= static_cast<double>(cum_by_trial.size());
        std::printf("  regret_at_%" PRId64 " = %s\n", cp,
                    bf::format_g17(mean).c_str());
        if (mean > 0.0) {
          xs.push_back(std::log(static_cast<double>(cp)));
          ys.push_back(std::log(mean));
        }
      }
      if (xs.size() >= 2) {
        double sx = 0, sy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          sx += xs[i];
          sy += ys[i];
        }
        const double mx = sx / xs.size(), my = sy / ys.size();
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          sxx += (xs[i] - mx) * (xs[i] - mx);
          sxy += (xs[i] - mx) * (ys[i] - my);
        }
        std::printf("  slope = %s\n", bf::format_g17(sxy / sxx).c_str());
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear-bandit simulation harness"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* run = app.add_subcommand("run", "run one experiment from a config");
  run->add_option("--config", opts.config_path, "config file path")->required();
  run->add_option("--out", opts.out_dir, "output directory override");
  run->add_option("--workers", opts.workers, "worker threads");
  run->add_option("--seed", opts.seed, "master seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });
  run->add_flag("--diagnostics", opts.diagnostics, "per-step diagnostics");

  auto* scale = app.add_subcommand("scale", "sweep horizon and dimension");
  scale->add_option("--config", opts.config_path, "config file path")->required();
  scale->add_option("--out", opts.out_dir, "output directory override");
  scale->add_option("--workers", opts.workers, "worker threads");
  scale->add_option("--seed", opts.seed, "master seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });

  std::string check_out;
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand(
      "check", "moment audits, lemma validators, convexity probes");
  check->add_option("--out", check_out, "directory for check_summary.txt");
  check->add_option("--seed", check_seed, "seed for the audits");

  std::string report_in, report_cps;
  auto* report = app.add_subcommand("report", "refit stored aggregates");
  report->add_option("--in", report_in, "run output directory")->required();
  report->add_option("--checkpoints", report_cps,
                     "comma-separated fit checkpoints");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts);
    if (scale->parsed()) return cmd_scale(opts);
    if (check->parsed()) return cmd_check(check_out, check_seed);
    if (report->parsed()) return cmd_report(report_in, report_cps);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "banditforge: %s\n", e.what());
    return 1;
  }
  return 0;
}
