// ============================================================================
// config.hpp -- Experiment configuration: flat key=value files, presets,
// and validation with actionable messages.
//
// A configuration is plain data (numbers and strings). make_scenario()
// builds the runnable Scenario and is where every invariant is enforced.
// Presets pin a complete experiment; explicitly set keys override preset
// values with a notice on stderr.
// ============================================================================
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtcsim/sim_engine.hpp"

namespace mtcsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  // scenario scalars
  double lambda_m = 0.1;
  double lambda_e = 0.01;
  double cell_radius = 20.0;
  double rate_regular = 0.01;
  double rate_alarm = 1.0;
  std::string model = "bernoulli";  // bernoulli | markov
  std::string q = "0.5";            // probability, or "px" to track each device's own p
  std::uint64_t n_slots = 200;
  std::uint64_t n_trials = 500;
  std::string event_window = "auto";  // auto | fixed
  double epsilon = 1e-6;
  double window_extent = 100.0;
  std::uint64_t seed = 1;
  std::uint64_t acf_max_lag = 0;
  std::string acf_convention = "truncated";  // truncated | textbook
  std::uint64_t threads = 0;

  // alarm-triggering function
  std::string atpf = "exponential";  // exponential | disk_step | table
  double atpf_scale = 1.0;
  double atpf_threshold = 5.0;
  double atpf_level = 1.0;
  std::string atpf_table;  // CSV path when atpf == table

  // sweep
  std::string sweep_axis = "lambda_e";  // lambda_e | q | none
  std::vector<double> sweep_values;     // empty: single point at the scenario value

  // output
  std::string out = "results.csv";
  std::string format = "csv";  // csv | json

  bool operator==(const ExperimentConfig&) const = default;

  Scenario make_scenario() const {
    Scenario sc;
    sc.lambda_m = lambda_m;
    sc.lambda_e = lambda_e;
    sc.cell_radius = cell_radius;
    sc.rates = RateParams{rate_regular, rate_alarm};
    sc.atpf = make_atpf();
    if (model == "bernoulli") {
      sc.model.kind = TrafficModelKind::bernoulli;
    } else if (model == "markov") {
      sc.model.kind = TrafficModelKind::markov;
      if (q == "px") {
        sc.model.q.reset();  // q tracks each device's own alarm probability
      } else {
        sc.model.q = parse_double(q, "q");
      }
    } else {
      throw ConfigError("config: model must be 'bernoulli' or 'markov' (got '" + model + "')");
    }
    sc.n_slots = checked_size(n_slots, "n_slots");
    sc.n_trials = checked_size(n_trials, "n_trials");
    if (event_window == "auto") {
      sc.window_policy = EventWindowPolicy::auto_truncated;
    } else if (event_window == "fixed") {
      sc.window_policy = EventWindowPolicy::fixed_extent;
    } else {
      throw ConfigError("config: event_window must be 'auto' or 'fixed' (got '" + event_window +
                        "')");
    }
    sc.epsilon = epsilon;
    sc.window_extent = window_extent;
    sc.seed = seed;
    sc.acf_max_lag = checked_size(acf_max_lag, "acf_max_lag", /*allow_zero=*/true);
    if (acf_convention == "truncated") {
      sc.acf_convention = AcfConvention::truncated_sum;
    } else if (acf_convention == "textbook") {
      sc.acf_convention = AcfConvention::textbook;
    } else {
      throw ConfigError("config: acf_convention must be 'truncated' or 'textbook' (got '" +
                        acf_convention + "')");
    }
    sc.threads = static_cast<unsigned>(threads);
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    return sc;
  }

  Atpf make_atpf() const {
    try {
      if (atpf == "exponential") return Atpf::exponential(atpf_scale);
      if (atpf == "disk_step") return Atpf::disk_step(atpf_threshold, atpf_level);
      if (atpf == "table") {
        if (atpf_table.empty()) throw ConfigError("config: atpf=table requires atpf_table=PATH");
        return Atpf::custom_table_from_csv(atpf_table);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: atpf must be 'exponential', 'disk_step' or 'table' (got '" + atpf +
                      "')");
  }

  OutputFormat output_format() const {
    if (format == "csv") return OutputFormat::csv;
    if (format == "json") return OutputFormat::json;
    throw ConfigError("config: format must be 'csv' or 'json' (got '" + format + "')");
  }

  std::optional<SweepAxis> axis() const {
    if (sweep_axis == "lambda_e") return SweepAxis::lambda_e;
    if (sweep_axis == "q") return SweepAxis::q;
    if (sweep_axis == "none") return std::nullopt;
    throw ConfigError("config: sweep_axis must be 'lambda_e', 'q' or 'none' (got '" + sweep_axis +
                      "')");
  }

  /// The values the run iterates over: the sweep grid, or the single
  /// in-scenario value when no grid is set.
  std::vector<double> effective_sweep_values() const {
    if (!sweep_values.empty()) return sweep_values;
    if (!axis().has_value()) return {lambda_e};
    if (axis() == SweepAxis::lambda_e) return {lambda_e};
    if (q == "px") {
      throw ConfigError(
          "config: a q sweep needs numeric sweep_values; q = px has no single axis value");
    }
    return {parse_double(q, "q")};
  }

  static double parse_double(const std::string& text, const char* key) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (text.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: ") + key + " must be a number (got '" + text + "')");
    }
  }

 private:
  static std::size_t checked_size(std::uint64_t v, const char* key, bool allow_zero = false) {
    if (!allow_zero && v == 0) {
      throw ConfigError(std::string("config: ") + key + " must be >= 1");
    }
    return static_cast<std::size_t>(v);
  }
};

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"table1-defaults", "fig3", "fig4", "fig5"};
  return names;
}

/// Fully specified experiments. fig3: expected total rate vs event density
/// under the Bernoulli model. fig4: rate vs alarm holding q under the Markov
/// model (the CLI also runs the companion lambda_e = 1e-3 pass). fig5:
/// trial-averaged ACF of the total rate for q in {0.1, 0.5, 0.9}.
inline ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;  // defaults already carry the baseline cell setup
  if (name == "table1-defaults" || name == "fig3") {
    cfg.model = "bernoulli";
    cfg.sweep_axis = "lambda_e";
    cfg.sweep_values = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
    cfg.out = name == "fig3" ? "fig3.csv" : "table1.csv";
    return cfg;
  }
  if (name == "fig4") {
    cfg.model = "markov";
    cfg.q = "0.1";
    cfg.lambda_e = 0.01;
    cfg.sweep_axis = "q";
    cfg.sweep_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    cfg.out = "fig4.csv";
    return cfg;
  }
  if (name == "fig5") {
    cfg.model = "markov";
    cfg.q = "0.1";
    cfg.lambda_m = 0.01;
    cfg.lambda_e = 0.01;
    cfg.sweep_axis = "q";
    cfg.sweep_values = {0.1, 0.5, 0.9};
    cfg.n_slots = 10000;
    cfg.n_trials = 100;
    cfg.acf_max_lag = 40;
    cfg.out = "fig5.csv";
    return cfg;
  }
  throw ConfigError("config: unknown preset '" + name +
                    "' (known: table1-defaults, fig3, fig4, fig5)");
}

// ---------------------------------------------------------------------------
// Flat key=value files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_double_list(const std::string& text, const char* key) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(ExperimentConfig::parse_double(item, key));
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& text, const char* key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (text.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(text);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(std::string("config: ") + key +
                      " must be a non-negative integer (got '" + text + "')");
  }
}

/// Apply one key=value pair. Returns false for unknown keys.
inline bool apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "lambda_m") cfg.lambda_m = ExperimentConfig::parse_double(value, "lambda_m");
  else if (key == "lambda_e") cfg.lambda_e = ExperimentConfig::parse_double(value, "lambda_e");
  else if (key == "cell_radius") cfg.cell_radius = ExperimentConfig::parse_double(value, "cell_radius");
  else if (key == "rate_regular") cfg.rate_regular = ExperimentConfig::parse_double(value, "rate_regular");
  else if (key == "rate_alarm") cfg.rate_alarm = ExperimentConfig::parse_double(value, "rate_alarm");
  else if (key == "model") cfg.model = value;
  else if (key == "q") cfg.q = value;
  else if (key == "n_slots") cfg.n_slots = parse_u64(value, "n_slots");
  else if (key == "n_trials") cfg.n_trials = parse_u64(value, "n_trials");
  else if (key == "event_window") cfg.event_window = value;
  else if (key == "epsilon") cfg.epsilon = ExperimentConfig::parse_double(value, "epsilon");
  else if (key == "window_extent") cfg.window_extent = ExperimentConfig::parse_double(value, "window_extent");
  else if (key == "seed") cfg.seed = parse_u64(value, "seed");
  else if (key == "acf_max_lag") cfg.acf_max_lag = parse_u64(value, "acf_max_lag");
  else if (key == "acf_convention") cfg.acf_convention = value;
  else if (key == "threads") cfg.threads = parse_u64(value, "threads");
  else if (key == "atpf") cfg.atpf = value;
  else if (key == "atpf_scale") cfg.atpf_scale = ExperimentConfig::parse_double(value, "atpf_scale");
  else if (key == "atpf_threshold") cfg.atpf_threshold = ExperimentConfig::parse_double(value, "atpf_threshold");
  else if (key == "atpf_level") cfg.atpf_level = ExperimentConfig::parse_double(value, "atpf_level");
  else if (key == "atpf_table") cfg.atpf_table = value;
  else if (key == "sweep_axis") cfg.sweep_axis = value;
  else if (key == "sweep_values") cfg.sweep_values = parse_double_list(value, "sweep_values");
  else if (key == "out") cfg.out = value;
  else if (key == "format") cfg.format = value;
  else return false;
  return true;
}

}  // namespace detail

/// Parse a flat key=value file. '#' starts a comment; keys are strict
/// (unknown or duplicate keys are rejected). A 'preset = NAME' line makes
/// the preset the base; every other key in the file overrides it, each
/// override reported on stderr.
inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");

  std::vector<std::pair<std::string, std::string>> pairs;
  std::optional<std::string> preset;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) + ": duplicate key '" +
                        key + "'");
    }
    if (key == "preset") {
      preset = value;
    } else {
      pairs.emplace_back(key, value);
    }
  }

  ExperimentConfig cfg = preset.has_value() ? preset_config(*preset) : ExperimentConfig{};
  for (const auto& [key, value] : pairs) {
    if (!detail::apply_key(cfg, key, value)) {
      throw ConfigError("config: unknown key '" + key + "' in " + path);
    }
    if (preset.has_value()) {
      std::cerr << "notice: '" << key << "' overrides preset '" << *preset << "'\n";
    }
  }
  return cfg;
}

/// Write a config as a flat key=value file that parse_config_file maps back
/// to an equal config. Doubles keep full precision.
inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("config: cannot write '" + path + "'");
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "lambda_m = " << num(cfg.lambda_m) << "\n";
  out << "lambda_e = " << num(cfg.lambda_e) << "\n";
  out << "cell_radius = " << num(cfg.cell_radius) << "\n";
  out << "rate_regular = " << num(cfg.rate_regular) << "\n";
  out << "rate_alarm = " << num(cfg.rate_alarm) << "\n";
  out << "model = " << cfg.model << "\n";
  out << "q = " << cfg.q << "\n";
  out << "n_slots = " << cfg.n_slots << "\n";
  out << "n_trials = " << cfg.n_trials << "\n";
  out << "event_window = " << cfg.event_window << "\n";
  out << "epsilon = " << num(cfg.epsilon) << "\n";
  out << "window_extent = " << num(cfg.window_extent) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "acf_max_lag = " << cfg.acf_max_lag << "\n";
  out << "acf_convention = " << cfg.acf_convention << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "atpf = " << cfg.atpf << "\n";
  out << "atpf_scale = " << num(cfg.atpf_scale) << "\n";
  out << "atpf_threshold = " << num(cfg.atpf_threshold) << "\n";
  out << "atpf_level = " << num(cfg.atpf_level) << "\n";
  if (!cfg.atpf_table.empty()) out << "atpf_table = " << cfg.atpf_table << "\n";
  out << "sweep_axis = " << cfg.sweep_axis << "\n";
  if (!cfg.sweep_values.empty()) {
    out << "sweep_values = ";
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
      if (i) out << ",";
      out << num(cfg.sweep_values[i]);
    }
    out << "\n";
  }
  out << "out = " << cfg.out << "\n";
  out << "format = " << cfg.format << "\n";
  if (!out) throw ConfigError("config: write failed for '" + path + "'");
}

}  // namespace mtcsim
