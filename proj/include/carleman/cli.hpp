// Command-line front end. Kept header-only and testable: run_cli is a pure
// function of argv that returns the process exit code. Exit convention:
// 0 pass/certified, 2 detected violation, 1 input error, 64 usage error.
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "carleman/pipeline.hpp"

namespace carleman {

namespace detail {

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input_error("cannot write " + path);
  out << body;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Interface Carleman estimate certification toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  double tau_min = 0.0, tau_max = 0.0, grid_h = 0.0;
  int tau_points = 0, sphere = 0;
  long seed = -1;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "validate a pair and certify transmission and pseudoconvexity");
  CLI::App* weights = app.add_subcommand("weights", "auto-configure weight parameters");
  CLI::App* verify = app.add_subcommand("verify", "sweep a Carleman estimate ratio");
  CLI::App* partition = app.add_subcommand("partition", "audit the partition of unity");
  for (CLI::App* sub : {analyze, weights, verify, partition}) {
    CLI::Option* c = sub->add_option("--config", config_path, "JSON run configuration");
    if (sub != partition) c->required();  // partition has self-contained defaults
    sub->add_option("--out", out_dir, "output directory (default from config)");
    sub->add_option("--tau-min", tau_min, "sweep lower tau");
    sub->add_option("--tau-max", tau_max, "sweep upper tau");
    sub->add_option("--tau-points", tau_points, "sweep point count");
    sub->add_option("--seed", seed, "sampling seed recorded in reports");
    sub->add_option("--grid-h", grid_h, "grid spacing override");
    sub->add_option("--sphere-samples", sphere, "sphere sample count override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tau_min > 0.0) cfg.sweep.tau_min = tau_min;
    if (tau_max > 0.0) cfg.sweep.tau_max = tau_max;
    if (tau_points > 0) cfg.sweep.points = tau_points;
    if (grid_h > 0.0) cfg.grid.h = grid_h;
    if (sphere > 0) cfg.sampling.sphere = sphere;
    if (seed >= 0) cfg.sampling.seed = seed;
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = [&](const char* name) { return cfg.out_dir + "/" + name; };

    if (analyze->parsed()) {
      if (!cfg.pair) throw invalid_input_error("analyze: config needs a coefficients block");
      const AnalyzeResult res = analyze_run(*cfg.pair, cfg.weights, cfg.sampling, cfg.grid.h);
      detail::write_text(path("analyze.json"), res.report.dump(2) + "\n");
      std::cout << "analyze: certified=" << (res.certified ? "true" : "false")
                << " gamma0=" << format_double(res.report["derived"]["gamma0"].get<double>())
                << "\n";
      const size_t shown = std::min<size_t>(res.violations.size(), 5);
      for (size_t i = 0; i < shown; ++i)
        std::cout << "violation: " << res.violations[i] << "\n";
      if (res.violations.size() > shown)
        std::cout << "... " << res.violations.size() - shown
                  << " more violations in analyze.json\n";
      return res.certified ? 0 : 2;
    }
    if (weights->parsed()) {
      if (!cfg.pair) throw invalid_input_error("weights: config needs a coefficients block");
      const json j = weights_run(*cfg.pair, cfg.sampling, cfg.grid.h);
      detail::write_text(path("weights.json"), j.dump(2) + "\n");
      std::cout << "weights: alpha_plus=" << format_double(j["alpha_plus"].get<double>())
                << " alpha_minus=" << format_double(j["alpha_minus"].get<double>())
                << " beta=" << format_double(j["beta"].get<double>())
                << " epsilon=" << format_double(j["epsilon"].get<double>())
                << " delta=" << format_double(j["delta"].get<double>()) << "\n";
      return 0;
    }
    if (verify->parsed()) {
      if (!cfg.pair) throw invalid_input_error("verify: config needs a coefficients block");
      const VerifyResult r = verify_run(*cfg.pair, cfg);
      detail::write_text(path("verify.json"), verify_json(r).dump(2) + "\n");
      std::ostringstream csv;
      write_sweep_csv(csv, r.report);
      detail::write_text(path("verify.csv"), csv.str());
      std::cout << "verify: estimate=" << estimate_name(r.report.estimate)
                << " max_ratio=" << format_double(r.report.max_ratio)
                << " argmax_tau=" << format_double(r.report.argmax_tau)
                << " knee_tau=" << format_double(r.report.knee_tau)
                << " bounded=" << (r.report.bounded ? "true" : "false") << "\n";
      if (r.support_shrunk)
        std::cout << "note: support radius shrunk to " << format_double(r.support_radius)
                  << " to fit the localization ball\n";
      return r.pass ? 0 : 2;
    }
    // partition
    const PartitionResult p = partition_run(cfg.partition);
    std::ostringstream csv;
    csv << kPartitionCsvHeader << "\n";
    write_partition_csv_row(csv, cfg.partition.mu, cfg.partition.dim, p.base);
    write_partition_csv_row(csv, 2.0 * cfg.partition.mu, cfg.partition.dim, p.doubled);
    detail::write_text(path("partition.csv"), csv.str());
    std::cout << "partition: mu=" << format_double(cfg.partition.mu)
              << " dim=" << cfg.partition.dim
              << " sum_defect=" << format_double(p.base.max_sum_defect)
              << " overlap=" << p.base.overlap_count
              << " pass=" << (p.pass ? "true" : "false") << "\n";
    return p.pass ? 0 : 2;
  } catch (const pseudoconvexity_error& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return 2;
  } catch (const singular_system_error& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace carleman
