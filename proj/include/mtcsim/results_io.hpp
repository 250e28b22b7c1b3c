// ============================================================================
// results_io.hpp -- CSV and JSON emission of experiment results.
//
// Rate CSV columns: axis_value,mc_mean,mc_stderr,closed_form,approx_markov,
// n_trials,n_slots. Fields that do not apply (the Markov approximation for
// Bernoulli runs, the standard error of a single trial) stay empty. Sweeps
// that collected an ACF additionally write one ACF file per point with
// columns lag,acf_mean,acf_stderr.
//
// Output is byte-deterministic: '.' decimal separator, '\n' line endings,
// fixed "%.12g" number formatting, and a mandatory header row.
// ============================================================================
#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtcsim/config.hpp"
#include "mtcsim/sim_engine.hpp"

namespace mtcsim {

namespace detail {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

/// "results.csv" + tag "q0.1" -> "results_acf_q0.1.csv"
inline std::string acf_path(const std::string& out_path, const std::string& tag) {
  const auto dot = out_path.rfind('.');
  const std::string stem = dot == std::string::npos ? out_path : out_path.substr(0, dot);
  const std::string ext = dot == std::string::npos ? ".csv" : out_path.substr(dot);
  return stem + "_acf_" + tag + ext;
}

inline std::string axis_name(const ExperimentConfig& cfg) {
  return cfg.sweep_axis == "none" ? "lambda_e" : cfg.sweep_axis;
}

}  // namespace detail

/// Write one rate CSV (plus per-point ACF CSVs when present). Returns the
/// paths written. Failed sweep points are reported on stderr and skipped in
/// the CSV body.
inline std::vector<std::string> write_results_csv(const std::vector<SweepPoint>& points,
                                                  const ExperimentConfig& cfg) {
  if (points.empty()) throw std::invalid_argument("write_results_csv: no results to emit");
  std::vector<std::string> written;
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot write '" + cfg.out + "'");
  out << "axis_value,mc_mean,mc_stderr,closed_form,approx_markov,n_trials,n_slots\n";
  for (const SweepPoint& p : points) {
    if (!p.stats.has_value()) {
      std::cerr << "warning: sweep point " << detail::fmt_num(p.axis_value)
                << " failed: " << p.error << "\n";
      continue;
    }
    const SummaryStats& s = *p.stats;
    out << detail::fmt_num(p.axis_value) << ',' << detail::fmt_num(s.mean_rate) << ','
        << (s.std_error_defined ? detail::fmt_num(s.std_error) : std::string{}) << ','
        << (s.closed_form ? detail::fmt_num(s.closed_form->value) : std::string{}) << ','
        << (s.approx_markov ? detail::fmt_num(*s.approx_markov) : std::string{}) << ','
        << s.n_trials << ',' << s.n_slots << '\n';
  }
  if (!out) throw std::runtime_error("emit: write failed for '" + cfg.out + "'");
  out.close();
  written.push_back(cfg.out);

  for (const SweepPoint& p : points) {
    if (!p.stats.has_value() || !p.stats->acf.has_value()) continue;
    const std::string path =
        detail::acf_path(cfg.out, detail::axis_name(cfg) + detail::fmt_num(p.axis_value));
    std::ofstream acf_out(path, std::ios::binary);
    if (!acf_out) throw std::runtime_error("emit: cannot write '" + path + "'");
    acf_out << "lag,acf_mean,acf_stderr\n";
    const AcfEstimate& acf = *p.stats->acf;
    for (std::size_t j = 0; j < acf.lags.size(); ++j) {
      acf_out << acf.lags[j] << ',' << detail::fmt_num(acf.values[j]) << ','
              << (acf.std_errors.empty() ? std::string{} : detail::fmt_num(acf.std_errors[j]))
              << '\n';
    }
    if (!acf_out) throw std::runtime_error("emit: write failed for '" + path + "'");
    written.push_back(path);
  }
  return written;
}

/// Mirror of the CSV schema as one JSON document (schema_version 1), with
/// per-point errors included rather than skipped.
inline std::vector<std::string> write_results_json(const std::vector<SweepPoint>& points,
                                                   const ExperimentConfig& cfg) {
  if (points.empty()) throw std::invalid_argument("write_results_json: no results to emit");
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["axis"] = detail::axis_name(cfg);
  doc["points"] = nlohmann::json::array();
  for (const SweepPoint& p : points) {
    nlohmann::json jp;
    jp["axis_value"] = p.axis_value;
    if (p.stats.has_value()) {
      const SummaryStats& s = *p.stats;
      jp["mc_mean"] = s.mean_rate;
      if (s.std_error_defined) {
        jp["mc_stderr"] = s.std_error;
      } else {
        jp["mc_stderr"] = nullptr;
      }
      jp["closed_form"] = s.closed_form ? nlohmann::json(s.closed_form->value) : nullptr;
      jp["approx_markov"] = s.approx_markov ? nlohmann::json(*s.approx_markov) : nullptr;
      jp["n_trials"] = s.n_trials;
      jp["n_slots"] = s.n_slots;
      if (s.acf.has_value()) {
        jp["acf"] = {{"lags", s.acf->lags},
                     {"values", s.acf->values},
                     {"std_errors", s.acf->std_errors}};
      } else {
        jp["acf"] = nullptr;
      }
      jp["error"] = nullptr;
    } else {
      jp["error"] = p.error;
    }
    doc["points"].push_back(std::move(jp));
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot write '" + cfg.out + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("emit: write failed for '" + cfg.out + "'");
  return {cfg.out};
}

inline std::vector<std::string> emit_results(const std::vector<SweepPoint>& points,
                                             const ExperimentConfig& cfg) {
  return cfg.output_format() == OutputFormat::csv ? write_results_csv(points, cfg)
                                                  : write_results_json(points, cfg);
}

}  // namespace mtcsim
