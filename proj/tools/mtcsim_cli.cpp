// ============================================================================
// mtcsim_cli.cpp -- command-line experiment runner.
//
// Resolution order: preset (if any), then config file keys, then command-line
// flags. Exit codes: 0 success, 2 configuration/validation error, 1 runtime
// error.
// ============================================================================
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtcsim/mtcsim.hpp"

namespace {

struct CliOverrides {
  std::vector<std::pair<std::string, std::string>> pairs;
  void set(const std::string& key, const std::string& value) { pairs.emplace_back(key, value); }
};

void run_one(const mtcsim::ExperimentConfig& cfg, bool quiet) {
  const mtcsim::Scenario base = cfg.make_scenario();
  const auto axis = cfg.axis();
  const std::vector<double> values = cfg.effective_sweep_values();

  std::vector<mtcsim::SweepPoint> points;
  if (axis.has_value()) {
    points = mtcsim::sweep(base, *axis, values);
  } else {
    mtcsim::SweepPoint p;
    p.axis_value = cfg.lambda_e;
    p.stats = mtcsim::run_experiment(base);
    points.push_back(std::move(p));
  }

  const auto files = mtcsim::emit_results(points, cfg);
  if (!quiet) {
    for (const mtcsim::SweepPoint& p : points) {
      std::cout << (cfg.sweep_axis == "none" ? "lambda_e" : cfg.sweep_axis) << "="
                << p.axis_value;
      if (p.stats.has_value()) {
        std::cout << "  mc_mean=" << p.stats->mean_rate;
        if (p.stats->std_error_defined) std::cout << " (se " << p.stats->std_error << ")";
        if (p.stats->closed_form) std::cout << "  closed_form=" << p.stats->closed_form->value;
        if (p.stats->approx_markov) std::cout << "  approx=" << *p.stats->approx_markov;
      } else {
        std::cout << "  ERROR: " << p.error;
      }
      std::cout << "\n";
    }
    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
  }
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtcsim: spatial traffic model Monte Carlo runner"};
  app.get_formatter()->column_width(28);

  std::string config_path, preset_name, save_config_path;
  bool quiet = false;
  CliOverrides ov;

  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--preset", preset_name, "table1-defaults | fig3 | fig4 | fig5");
  app.add_flag("--quiet", quiet, "suppress per-point progress output");
  app.add_option("--save-config", save_config_path, "write the resolved config to PATH");

  const auto opt = [&](const char* flag, const char* key, const char* help) {
    app.add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.set(key, v); }, help);
  };
  opt("--seed", "seed", "base RNG seed (u64)");
  opt("--out", "out", "output path");
  opt("--format", "format", "csv | json");
  opt("--trials", "n_trials", "Monte Carlo trials per point");
  opt("--slots", "n_slots", "time slots per trial");
  opt("--lambda-m", "lambda_m", "device density per m^2");
  opt("--lambda-e", "lambda_e", "event density per m^2");
  opt("--cell-radius", "cell_radius", "cell radius in m");
  opt("--rate-alarm", "rate_alarm", "alarm-state rate, packets/slot");
  opt("--rate-regular", "rate_regular", "regular-state rate, packets/slot");
  opt("--model", "model", "bernoulli | markov");
  opt("--q", "q", "Markov alarm holding parameter in [0,1), or 'px'");
  opt("--atpf", "atpf", "exponential | disk_step | table");
  opt("--atpf-scale", "atpf_scale", "exponential scale in m");
  opt("--atpf-threshold", "atpf_threshold", "disk_step threshold in m");
  opt("--atpf-level", "atpf_level", "disk_step level in [0,1]");
  opt("--atpf-table", "atpf_table", "CSV path (radius_m,probability), header required");
  opt("--event-window", "event_window", "auto | fixed");
  opt("--epsilon", "epsilon", "auto window truncation bound");
  opt("--window-extent", "window_extent", "fixed window square side in m");
  opt("--sweep-axis", "sweep_axis", "lambda_e | q | none");
  opt("--sweep-values", "sweep_values", "comma-separated sweep grid");
  opt("--acf-max-lag", "acf_max_lag", "attach trial-averaged ACF up to this lag");
  opt("--acf-convention", "acf_convention", "truncated | textbook summation bounds");
  opt("--threads", "threads", "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    mtcsim::ExperimentConfig cfg;
    std::optional<std::string> applied_preset;
    if (!preset_name.empty()) {
      cfg = mtcsim::preset_config(preset_name);
      applied_preset = preset_name;
    }
    if (!config_path.empty()) {
      if (applied_preset.has_value()) {
        throw mtcsim::ConfigError(
            "config: give the preset either on the command line or in the file, not both");
      }
      cfg = mtcsim::parse_config_file(config_path);
    }
    for (const auto& [key, value] : ov.pairs) {
      if (!mtcsim::detail::apply_key(cfg, key, value)) {
        throw mtcsim::ConfigError("config: unknown key '" + key + "'");
      }
      if (applied_preset.has_value()) {
        std::cerr << "notice: '" << key << "' overrides preset '" << *applied_preset << "'\n";
      }
    }

    if (!save_config_path.empty()) {
      mtcsim::save_config(cfg, save_config_path);
      if (!quiet) std::cout << "wrote " << save_config_path << "\n";
    }

    run_one(cfg, quiet);

    // fig4 compares two event densities; run the companion pass as well
    if (applied_preset == "fig4") {
      mtcsim::ExperimentConfig second = cfg;
      second.lambda_e = 1e-3;
      second.out = with_suffix(cfg.out, "_le0.001");
      if (!quiet) std::cout << "fig4 companion pass at lambda_e=0.001\n";
      run_one(second, quiet);
    }
    return 0;
  } catch (const mtcsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
