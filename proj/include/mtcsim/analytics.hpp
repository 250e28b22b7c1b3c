// ============================================================================
// analytics.hpp -- Closed-form rates and autocovariance estimation.
//
// Closed forms, for device density lambda_m on a disk of radius R, event
// density lambda_e on the plane, and an alarm-triggering function f with
// radial first moment I_f:
//
//   mean alarm probability   p_bar = 1 - exp(-2 pi lambda_e I_f)
//   expected total rate      lambda_m pi R^2 (R_A + (R_R - R_A) exp(-2 pi lambda_e I_f))
//   Markov approximation     lambda_m pi R^2 (pi_A(p_bar) R_A + pi_R(p_bar) R_R)
//     with pi_A(p) = p / (1 + p - q), pi_R(p) = (1 - q) / (1 + p - q).
//
// The Markov approximation replaces every device's own alarm probability by
// the mean; since pi_A is concave in p it upper-bounds the true expected
// Markov rate whenever R_A >= R_R.
//
// The autocovariance estimator is self-normalized by the sample variance
// (denominator N-1). Two summation conventions are provided: the default
// stops one term short of the full overlap at each lag; `textbook` uses the
// full overlap, making the lag-0 value exactly (N-1)/N. They differ by
// O(1/N).
// ============================================================================
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mtcsim/atpf.hpp"
#include "mtcsim/geometry.hpp"
#include "mtcsim/traffic_models.hpp"

namespace mtcsim {

/// Expected total rate with its additive decomposition.
struct ClosedFormRate {
  double value = 0.0;        // packets/slot
  double device_mass = 0.0;  // expected device count, lambda_m pi R^2
  double alarm_term = 0.0;   // device_mass * R_A * p_bar
  double regular_term = 0.0; // device_mass * R_R * (1 - p_bar)
};

namespace detail {
inline void check_rate_inputs(double lambda_m, double lambda_e, double cell_radius,
                              RateParams rates) {
  if (!std::isfinite(lambda_m) || lambda_m < 0.0) {
    throw std::invalid_argument("analytics: lambda_m must be finite and >= 0");
  }
  if (!std::isfinite(lambda_e) || lambda_e < 0.0) {
    throw std::invalid_argument("analytics: lambda_e must be finite and >= 0");
  }
  if (!std::isfinite(cell_radius) || cell_radius <= 0.0) {
    throw std::invalid_argument("analytics: cell_radius must be finite and > 0");
  }
  if (!std::isfinite(rates.rate_regular) || rates.rate_regular < 0.0 ||
      !std::isfinite(rates.rate_alarm) || rates.rate_alarm < 0.0) {
    throw std::invalid_argument("analytics: rates must be finite and >= 0");
  }
}
}  // namespace detail

/// p_bar = 1 - exp(-2 pi lambda_e I_f). Underflow of the exponential for
/// huge lambda_e saturates cleanly to 1.
inline double mean_alarm_probability(double lambda_e, const Atpf& atpf) {
  if (!std::isfinite(lambda_e) || lambda_e < 0.0) {
    throw std::invalid_argument("mean_alarm_probability: lambda_e must be finite and >= 0");
  }
  return -std::expm1(-2.0 * kPi * lambda_e * atpf.first_moment_integral());
}

inline ClosedFormRate expected_total_rate(double lambda_m, double lambda_e, double cell_radius,
                                          RateParams rates, const Atpf& atpf) {
  detail::check_rate_inputs(lambda_m, lambda_e, cell_radius, rates);
  ClosedFormRate out;
  out.device_mass = lambda_m * kPi * cell_radius * cell_radius;
  const double p_bar = mean_alarm_probability(lambda_e, atpf);
  out.alarm_term = out.device_mass * rates.rate_alarm * p_bar;
  out.regular_term = out.device_mass * rates.rate_regular * (1.0 - p_bar);
  out.value = out.alarm_term + out.regular_term;
  return out;
}

/// Low-complexity Markov-model rate: every device's alarm probability
/// replaced by the mean p_bar in the steady state.
inline double approx_total_rate_markov(double lambda_m, double lambda_e, double cell_radius,
                                       RateParams rates, const Atpf& atpf, MarkovParams mp) {
  detail::check_rate_inputs(lambda_m, lambda_e, cell_radius, rates);
  const double mass = lambda_m * kPi * cell_radius * cell_radius;
  const double p_bar = mean_alarm_probability(lambda_e, atpf);
  const SteadyState pi = steady_state(p_bar, mp);
  return mass * (pi.alarm * rates.rate_alarm + pi.regular * rates.rate_regular);
}

// ---------------------------------------------------------------------------
// Sample autocovariance
// ---------------------------------------------------------------------------

enum class AcfConvention {
  truncated_sum,  // sum_{i=0}^{N-k-2} (x_i - m)(x_{i+k} - m) / ((N-k) s^2)
  textbook,       // sum_{i=0}^{N-k-1} ... / ((N-k) s^2); lag 0 == (N-1)/N
};

/// Self-normalized sample autocovariance at lags 0..max_lag, possibly
/// averaged over trials (see averaged_acf).
struct AcfEstimate {
  std::vector<std::size_t> lags;
  std::vector<double> values;
  std::vector<double> std_errors;  // filled by averaged_acf when >= 2 trials
  std::size_t n_trials = 1;
  std::size_t n_slots = 0;
};

inline AcfEstimate sample_autocovariance(const std::vector<double>& series, std::size_t max_lag,
                                         AcfConvention convention = AcfConvention::truncated_sum) {
  const std::size_t n = series.size();
  if (n < max_lag + 2) {
    throw std::invalid_argument("sample_autocovariance: series length must exceed max_lag + 1");
  }
  double sum = 0.0, comp = 0.0;
  for (double v : series) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double mean = sum / static_cast<double>(n);
  std::vector<double> dev(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = series[i] - mean;
    ss += dev[i] * dev[i];
  }
  const double variance = ss / static_cast<double>(n - 1);
  if (variance == 0.0) {
    throw std::domain_error("sample_autocovariance: degenerate series (zero sample variance)");
  }

  AcfEstimate est;
  est.n_trials = 1;
  est.n_slots = n;
  est.lags.reserve(max_lag + 1);
  est.values.reserve(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const std::size_t terms =
        convention == AcfConvention::truncated_sum ? n - k - 1 : n - k;
    double acc = 0.0;
    for (std::size_t i = 0; i < terms; ++i) {
      acc += dev[i] * dev[i + k];
    }
    est.lags.push_back(k);
    est.values.push_back(acc / (static_cast<double>(n - k) * variance));
  }
  return est;
}

/// Pointwise mean of per-trial estimates sharing the same lag grid and
/// horizon. Standard errors across trials are attached when there are at
/// least two.
inline AcfEstimate averaged_acf(const std::vector<AcfEstimate>& per_trial) {
  if (per_trial.empty()) {
    throw std::invalid_argument("averaged_acf: need at least one estimate");
  }
  const AcfEstimate& first = per_trial.front();
  for (const AcfEstimate& e : per_trial) {
    if (e.lags != first.lags || e.n_slots != first.n_slots) {
      throw std::invalid_argument("averaged_acf: estimates must share lags and n_slots");
    }
  }
  AcfEstimate out;
  out.lags = first.lags;
  out.n_slots = first.n_slots;
  out.n_trials = 0;
  for (const AcfEstimate& e : per_trial) out.n_trials += e.n_trials;

  const std::size_t m = first.lags.size();
  const std::size_t n = per_trial.size();
  out.values.assign(m, 0.0);
  for (const AcfEstimate& e : per_trial) {
    for (std::size_t j = 0; j < m; ++j) out.values[j] += e.values[j];
  }
  for (double& v : out.values) v /= static_cast<double>(n);

  if (n >= 2) {
    out.std_errors.assign(m, 0.0);
    for (const AcfEstimate& e : per_trial) {
      for (std::size_t j = 0; j < m; ++j) {
        const double d = e.values[j] - out.values[j];
        out.std_errors[j] += d * d;
      }
    }
    for (double& s : out.std_errors) {
      s = std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
    }
  }
  return out;
}

}  // namespace mtcsim
