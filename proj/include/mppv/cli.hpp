#pragma once
// Command-line front end. Thin dispatcher: parse flags, load the config,
// apply overrides, call into the library, render output. Exit codes are a
// stable contract: 0 pass, 1 verification failure, 2 config/usage error,
// 3 numeric error. Diagnostics go to standard error; results to standard
// output and the resolved output directory.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mppv/config.hpp"
#include "mppv/report.hpp"

namespace mppv {

namespace cli {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  std::optional<unsigned> threads;
  std::string out;
  std::string format;
};

inline void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "scenario config file")->required();
  cmd->add_option("--seed", flags.seed, "override the master seed");
  cmd->add_option("--paths", flags.paths, "override the path count");
  cmd->add_option("--threads", flags.threads, "worker threads for path generation");
  cmd->add_option("--out", flags.out, "output directory (default: config, then MPPV_OUT_DIR)");
  cmd->add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
}

inline ScenarioConfig load_with_overrides(const CommonFlags& flags) {
  ScenarioConfig cfg = load_scenario(flags.config);
  if (flags.seed) cfg.scenario.master_seed = *flags.seed;
  if (flags.paths) {
    if (*flags.paths == 0) throw ConfigError("--paths: must be >= 1");
    cfg.scenario.num_paths = *flags.paths;
  }
  if (flags.threads) {
    if (*flags.threads == 0) throw ConfigError("--threads: must be >= 1");
    cfg.scenario.threads = *flags.threads;
  }
  if (!flags.out.empty()) cfg.output.dir = flags.out;
  if (!flags.format.empty()) cfg.output.formats = {flags.format};
  cfg.scenario.validate();
  return cfg;
}

inline std::string resolve_out_dir(const OutputSpec& output) {
  if (!output.dir.empty()) return output.dir;
  if (const char* env = std::getenv("MPPV_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  return file;
}

inline int cmd_simulate(const CommonFlags& flags) {
  const ScenarioConfig cfg = load_with_overrides(flags);
  const Scenario& sc = cfg.scenario;
  const PathBatch batch = generate_paths(sc.plan(), sc.threads);

  const std::string dir = resolve_out_dir(cfg.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "'");

  const std::filesystem::path paths_file =
      std::filesystem::path(dir) / (sc.name + ".paths.csv");
  {
    auto file = open_output(paths_file);
    file << "path,theta,event_times...\n";
    for (std::uint64_t i = 0; i < batch.size(); ++i) {
      file << i << ',' << detail::round_trip(batch.theta_of(i));
      for (double t : batch.events_of(i)) file << ',' << detail::round_trip(t);
      file << '\n';
    }
  }

  // Sample moments of the terminal count and of the parameter draw.
  double sum_n = 0.0, sum_n2 = 0.0, sum_theta = 0.0, sum_theta2 = 0.0;
  const double n_paths = static_cast<double>(batch.size());
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    const double n_i = static_cast<double>(batch.events_of(i).size());
    sum_n += n_i;
    sum_n2 += n_i * n_i;
    sum_theta += batch.theta_of(i);
    sum_theta2 += batch.theta_of(i) * batch.theta_of(i);
  }
  const double mean_n = sum_n / n_paths;
  const double var_n =
      batch.size() > 1 ? (sum_n2 - n_paths * mean_n * mean_n) / (n_paths - 1.0) : 0.0;
  const double mean_theta = sum_theta / n_paths;
  const double var_theta =
      batch.size() > 1 ? (sum_theta2 - n_paths * mean_theta * mean_theta) / (n_paths - 1.0)
                       : 0.0;

  const std::filesystem::path summary_file =
      std::filesystem::path(dir) / (sc.name + ".summary.csv");
  {
    auto file = open_output(summary_file);
    file << "metric,value\n";
    file << "num_paths," << batch.size() << '\n';
    file << "horizon," << detail::round_trip(sc.horizon) << '\n';
    file << "mean_count," << detail::round_trip(mean_n) << '\n';
    file << "var_count," << detail::round_trip(var_n) << '\n';
    file << "mean_count_per_time," << detail::round_trip(mean_n / sc.horizon) << '\n';
    file << "mean_theta," << detail::round_trip(mean_theta) << '\n';
    file << "var_theta," << detail::round_trip(var_theta) << '\n';
  }

  std::printf("simulated %llu paths of '%s' to horizon %g\n",
              static_cast<unsigned long long>(batch.size()), sc.name.c_str(), sc.horizon);
  std::printf("mean count %.6g, variance %.6g (per unit time: %.6g)\n", mean_n, var_n,
              mean_n / sc.horizon);
  std::printf("wrote %s\nwrote %s\n", paths_file.c_str(), summary_file.c_str());
  return 0;
}

inline int cmd_fdd(const CommonFlags& flags, const std::vector<double>& times,
                   const std::vector<std::int64_t>& counts) {
  const ScenarioConfig cfg = load_with_overrides(flags);
  const Scenario& sc = cfg.scenario;
  const FddQuery query(times, counts);  // throws DomainError on a bad grid
  const FddEvaluator evaluator = sc.exact_evaluator();
  const double value = evaluator(query);
  // Closed forms are exact to rounding; the quadrature route is governed by
  // its relative tolerance.
  const double error_estimate =
      (sc.evaluator == EvaluatorChoice::kQuadrature ? sc.quadrature.rel_tol : 4e-16) *
      std::max(value, 1e-300);

  const std::string format = cfg.output.formats.size() == 1 ? cfg.output.formats[0] : "text";
  auto joined = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      s += (i ? ";" : "") + detail::fmt_double(static_cast<double>(xs[i]));
    }
    return s;
  };
  if (format == "json") {
    nlohmann::ordered_json row;
    row["evaluator"] = evaluator.describe();
    row["times"] = times;
    row["increments"] = counts;
    row["value"] = value;
    row["error_estimate"] = error_estimate;
    std::printf("%s\n", row.dump(2).c_str());
  } else if (format == "csv") {
    std::printf("times,increments,value,error_estimate\n%s,%s,%s,%s\n", joined(times).c_str(),
                joined(counts).c_str(), detail::round_trip(value).c_str(),
                detail::round_trip(error_estimate).c_str());
  } else {
    std::printf("P(increments %s over times %s) = %.17g  (error estimate <= %.3g)\n",
                joined(counts).c_str(), joined(times).c_str(), value, error_estimate);
    std::printf("evaluator: %s\n", evaluator.describe().c_str());
  }
  return 0;
}

inline int cmd_verify(const CommonFlags& flags) {
  const ScenarioConfig cfg = load_with_overrides(flags);
  const VerificationReport rep = run_full_verification(cfg.scenario);
  const std::string dir = resolve_out_dir(cfg.output);
  for (const auto& path : write_report_files(rep, dir, cfg.output.formats)) {
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  std::fputs(report_to_text(rep).c_str(), stdout);
  return rep.overall_pass() ? 0 : 1;
}

inline int cmd_assumption_check(const CommonFlags& flags) {
  const ScenarioConfig cfg = load_with_overrides(flags);
  const Scenario& sc = cfg.scenario;
  // This command reports the regularity facts as they stand; control
  // expectation-inversion applies only to the full verification suite.
  VerificationReport rep;
  rep.scenario_name = sc.name;
  rep.master_seed = sc.master_seed;
  rep.tolerances = sc.tol;
  rep.control = sc.is_control;
  for (auto& row : assumption_records(run_assumption_suite(sc), false)) {
    rep.checks.push_back(std::move(row));
  }
  rep.checks.push_back(run_rate_identity_check(sc));

  const std::string dir = resolve_out_dir(cfg.output);
  VerificationReport named = rep;
  named.scenario_name = sc.name + ".assumption";
  for (const auto& path : write_report_files(named, dir, cfg.output.formats)) {
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  std::fputs(report_to_text(rep).c_str(), stdout);
  return rep.overall_pass() ? 0 : 1;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"mixed Poisson process verification toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  cli::CommonFlags sim_flags, fdd_flags, verify_flags, assume_flags;
  std::vector<double> fdd_times;
  std::vector<std::int64_t> fdd_counts;

  CLI::App* sim = app.add_subcommand("simulate", "generate paths; dump events and a summary");
  cli::add_common_flags(sim, sim_flags);

  CLI::App* fdd = app.add_subcommand("fdd", "evaluate an exact finite-dimensional probability");
  cli::add_common_flags(fdd, fdd_flags);
  fdd->add_option("--times", fdd_times, "grid 0 < t_1 < ... < t_m")
      ->required()
      ->delimiter(',');
  fdd->add_option("--counts", fdd_counts, "increment counts, one per grid point")
      ->required()
      ->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run the full verification suite");
  cli::add_common_flags(verify, verify_flags);

  CLI::App* assume = app.add_subcommand("assumption-check", "check kernel regularity only");
  cli::add_common_flags(assume, assume_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cli::cmd_simulate(sim_flags);
    if (fdd->parsed()) return cli::cmd_fdd(fdd_flags, fdd_times, fdd_counts);
    if (verify->parsed()) return cli::cmd_verify(verify_flags);
    if (assume->parsed()) return cli::cmd_assumption_check(assume_flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const AssumptionViolation& e) {
    std::fprintf(stderr, "assumption violation: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}

}  // namespace mppv
