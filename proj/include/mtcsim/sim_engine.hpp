// ============================================================================
// sim_engine.hpp -- Monte Carlo orchestration.
//
// One trial: draw a device realization on the cell disk and an event
// realization on the policy window, compute the alarm field once (devices
// and events are static), sample per-device state sequences over n_slots,
// and accumulate the per-slot total rate. Trials are deterministic given
// (seed, trial_index) and therefore safe to run on any number of workers;
// reduction walks trials in index order so results are bit-identical
// regardless of scheduling.
// ============================================================================
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mtcsim/alarm_field.hpp"
#include "mtcsim/analytics.hpp"
#include "mtcsim/atpf.hpp"
#include "mtcsim/point_process.hpp"
#include "mtcsim/random.hpp"
#include "mtcsim/traffic_models.hpp"

namespace mtcsim {

enum class TrafficModelKind { bernoulli, markov };

/// Traffic model selection. For the Markov model, `q` fixes the alarm
/// holding parameter; leaving it empty lets q track each device's own alarm
/// probability, which reproduces the Bernoulli model exactly.
struct TrafficModel {
  TrafficModelKind kind = TrafficModelKind::bernoulli;
  std::optional<double> q;
};

enum class EventWindowPolicy {
  auto_truncated,  // smallest disk with certified omitted-trigger mass <= epsilon
  fixed_extent,    // square of side `window_extent` centered on the cell
};

/// Full parameter set of one Monte Carlo experiment.
struct Scenario {
  double lambda_m = 0.1;   // devices per m^2
  double lambda_e = 0.01;  // events per m^2
  double cell_radius = 20.0;
  RateParams rates{0.01, 1.0};
  Atpf atpf = Atpf::exponential(1.0);
  TrafficModel model{};
  std::size_t n_slots = 200;
  std::size_t n_trials = 500;
  EventWindowPolicy window_policy = EventWindowPolicy::auto_truncated;
  double epsilon = 1e-6;        // auto_truncated bound
  double window_extent = 100.0; // fixed_extent square side
  std::uint64_t seed = 1;
  std::size_t acf_max_lag = 0;  // > 0: attach a trial-averaged ACF
  AcfConvention acf_convention = AcfConvention::truncated_sum;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (!std::isfinite(lambda_m) || lambda_m < 0.0) {
      throw std::invalid_argument("Scenario: lambda_m must be finite and >= 0");
    }
    if (!std::isfinite(lambda_e) || lambda_e < 0.0) {
      throw std::invalid_argument("Scenario: lambda_e must be finite and >= 0");
    }
    if (!std::isfinite(cell_radius) || cell_radius <= 0.0) {
      throw std::invalid_argument("Scenario: cell_radius must be finite and > 0");
    }
    if (!std::isfinite(rates.rate_regular) || rates.rate_regular < 0.0 ||
        !std::isfinite(rates.rate_alarm) || rates.rate_alarm < 0.0) {
      throw std::invalid_argument("Scenario: rates must be finite and >= 0");
    }
    if (n_slots == 0) throw std::invalid_argument("Scenario: n_slots must be >= 1");
    if (n_trials == 0) throw std::invalid_argument("Scenario: n_trials must be >= 1");
    if (!std::isfinite(epsilon) || epsilon <= 0.0) {
      throw std::invalid_argument("Scenario: epsilon must be finite and > 0");
    }
    if (window_policy == EventWindowPolicy::fixed_extent &&
        (!std::isfinite(window_extent) || window_extent <= 0.0)) {
      throw std::invalid_argument("Scenario: window_extent must be finite and > 0");
    }
    if (model.kind == TrafficModelKind::markov && model.q.has_value()) {
      MarkovParams check(*model.q);  // validates q in [0, 1)
      (void)check;
    }
    if (acf_max_lag > 0 && n_slots < acf_max_lag + 2) {
      throw std::invalid_argument("Scenario: n_slots must exceed acf_max_lag + 1");
    }
  }

  Window cell() const { return Window::disk({0.0, 0.0}, cell_radius); }

  Window event_window() const {
    if (window_policy == EventWindowPolicy::auto_truncated) {
      return required_event_window(cell(), atpf, lambda_e, epsilon);
    }
    const double h = 0.5 * window_extent;
    return Window::rectangle({-h, -h}, {h, h});
  }
};

/// Per-slot total rate of one trial.
struct RateSeries {
  std::vector<double> total_rate;
  std::uint64_t trial_index = 0;
};

/// Monte Carlo aggregates of one experiment.
struct SummaryStats {
  double mean_rate = 0.0;
  double std_error = 0.0;
  bool std_error_defined = false;  // false when n_trials == 1
  std::size_t n_trials = 0;
  std::size_t n_slots = 0;
  std::optional<ClosedFormRate> closed_form;
  std::optional<double> approx_markov;
  std::optional<AcfEstimate> acf;
};

inline RateSeries run_trial(const Scenario& sc, std::uint64_t trial_index) {
  auto dev_rng = stream_for(sc.seed, trial_index, StreamRole::devices);
  auto ev_rng = stream_for(sc.seed, trial_index, StreamRole::events);
  auto st_rng = stream_for(sc.seed, trial_index, StreamRole::states);

  const PointRealization devices = sample_ppp(sc.lambda_m, sc.cell(), dev_rng);
  const PointRealization events = sample_ppp(sc.lambda_e, sc.event_window(), ev_rng);
  const AlarmProbabilityField field = field_for_realization(devices, events, sc.atpf, sc.epsilon);

  RateSeries series;
  series.trial_index = trial_index;
  series.total_rate.assign(sc.n_slots, 0.0);
  for (std::size_t i = 0; i < field.probabilities.size(); ++i) {
    const double p = field.probabilities[i];
    const StateSequence seq =
        sc.model.kind == TrafficModelKind::bernoulli
            ? sample_bernoulli_states(p, sc.n_slots, st_rng, i)
            : sample_markov_states(p, MarkovParams(sc.model.q.value_or(p)), sc.n_slots, st_rng, i);
    for (std::size_t k = 0; k < sc.n_slots; ++k) {
      series.total_rate[k] += rate_of(seq.states[k], sc.rates);
    }
  }
  return series;
}

namespace detail {

struct TrialSummary {
  double time_mean = 0.0;
  std::optional<AcfEstimate> acf;  // empty when not requested or degenerate
};

inline TrialSummary summarize_trial(const Scenario& sc, std::uint64_t trial_index) {
  const RateSeries series = run_trial(sc, trial_index);
  TrialSummary out;
  double sum = 0.0, comp = 0.0;
  for (double v : series.total_rate) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  out.time_mean = sum / static_cast<double>(sc.n_slots);
  if (sc.acf_max_lag > 0) {
    try {
      out.acf = sample_autocovariance(series.total_rate, sc.acf_max_lag, sc.acf_convention);
    } catch (const std::domain_error&) {
      // degenerate series (e.g. an empty cell): excluded from the ACF average
    }
  }
  return out;
}

}  // namespace detail

/// Run n_trials trials (parallelized when threads allow) and aggregate.
/// trial_offset shifts the global trial indices, giving sweeps disjoint,
/// reproducible streams per point while sharing the base seed.
inline SummaryStats run_experiment(const Scenario& sc, std::uint64_t trial_offset = 0) {
  sc.validate();

  std::vector<detail::TrialSummary> slots(sc.n_trials);
  unsigned n_workers = sc.threads != 0 ? sc.threads : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  if (n_workers > sc.n_trials) n_workers = static_cast<unsigned>(sc.n_trials);

  if (n_workers <= 1) {
    for (std::size_t t = 0; t < sc.n_trials; ++t) {
      slots[t] = detail::summarize_trial(sc, trial_offset + t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= sc.n_trials || failed.load()) return;
        try {
          slots[t] = detail::summarize_trial(sc, trial_offset + t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SummaryStats stats;
  stats.n_trials = sc.n_trials;
  stats.n_slots = sc.n_slots;

  // reduce in trial order: results do not depend on worker scheduling
  double sum = 0.0, comp = 0.0;
  for (const auto& s : slots) {
    const double y = s.time_mean - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  stats.mean_rate = sum / static_cast<double>(sc.n_trials);
  if (sc.n_trials >= 2) {
    double ss = 0.0;
    for (const auto& s : slots) {
      const double d = s.time_mean - stats.mean_rate;
      ss += d * d;
    }
    stats.std_error =
        std::sqrt(ss / static_cast<double>(sc.n_trials - 1) / static_cast<double>(sc.n_trials));
    stats.std_error_defined = true;
  }

  stats.closed_form = expected_total_rate(sc.lambda_m, sc.lambda_e, sc.cell_radius, sc.rates, sc.atpf);
  if (sc.model.kind == TrafficModelKind::markov && sc.model.q.has_value()) {
    stats.approx_markov = approx_total_rate_markov(sc.lambda_m, sc.lambda_e, sc.cell_radius,
                                                   sc.rates, sc.atpf, MarkovParams(*sc.model.q));
  }

  if (sc.acf_max_lag > 0) {
    std::vector<AcfEstimate> per_trial;
    per_trial.reserve(sc.n_trials);
    for (const auto& s : slots) {
      if (s.acf.has_value()) per_trial.push_back(*s.acf);
    }
    if (!per_trial.empty()) stats.acf = averaged_acf(per_trial);
  }
  return stats;
}

enum class SweepAxis { lambda_e, q };

/// One sweep point: either stats or the error that prevented them.
struct SweepPoint {
  double axis_value = 0.0;
  std::optional<SummaryStats> stats;
  std::string error;
};

/// One run_experiment per value. All points share the base seed; point i
/// offsets its trial indices by i * n_trials, so streams are disjoint across
/// points. Per-point failures are recorded and the sweep continues.
inline std::vector<SweepPoint> sweep(const Scenario& base, SweepAxis axis,
                                     const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepPoint point;
    point.axis_value = values[i];
    Scenario sc = base;
    if (axis == SweepAxis::lambda_e) {
      sc.lambda_e = values[i];
    } else {
      sc.model.q = values[i];  // ignored by the Bernoulli model
    }
    try {
      point.stats = run_experiment(sc, static_cast<std::uint64_t>(i) * base.n_trials);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace mtcsim
