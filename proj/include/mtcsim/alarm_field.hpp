// ============================================================================
// alarm_field.hpp -- Per-device alarm probabilities from an event realization.
//
// A device at x surrounded by events y_1, ..., y_n goes into alarm with
// probability
//   p_x = 1 - prod_j (1 - f(||x - y_j||)),
// alarms from different events being independent. The product is evaluated
// as exp(sum log1p(-f)) for numerical stability.
//
// The event process conceptually covers the whole plane; simulation windows
// are finite. truncation_radius computes how far beyond the device cell the
// simulated events must extend so that the expected triggering mass of the
// omitted events stays below a caller-chosen epsilon:
//   2 * pi * density * tail_mass(r_trunc) <= epsilon.
// ============================================================================
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtcsim/atpf.hpp"
#include "mtcsim/geometry.hpp"
#include "mtcsim/point_process.hpp"

namespace mtcsim {

/// Hard cap on the truncation search; tails still above target here are
/// treated as non-truncatable.
inline constexpr double kMaxTruncationRadius = 1e4;

/// Alarm probability of a single device against a fixed event realization.
/// Contributions with f below 1e-18 are dropped (see Atpf::negligible_radius);
/// the induced error is under accumulated rounding noise.
inline double alarm_probability(Vec2 device, const PointRealization& events, const Atpf& atpf) {
  const double r_cut = atpf.negligible_radius();
  const double cut2 = r_cut * r_cut;
  double log_sum = 0.0;
  for (const Vec2& e : events.points) {
    const double d2 = squared_distance(device, e);
    if (d2 > cut2) continue;
    const double p_xy = atpf(std::sqrt(d2));
    if (p_xy >= 1.0) return 1.0;
    // below 1e-9 the higher log1p terms are < 5e-19 and can be dropped
    log_sum += p_xy < 1e-9 ? -p_xy : std::log1p(-p_xy);
  }
  return -std::expm1(log_sum);
}

/// Smallest radius r with 2 * pi * event_density * tail_mass(r) <= epsilon.
inline double truncation_radius(const Atpf& atpf, double event_density, double epsilon) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw std::invalid_argument("truncation_radius: epsilon must be finite and > 0");
  }
  if (!std::isfinite(event_density) || event_density < 0.0) {
    throw std::invalid_argument("truncation_radius: event density must be finite and >= 0");
  }
  if (event_density == 0.0) return 0.0;

  const double target = epsilon / (2.0 * kPi * event_density);
  if (atpf.tail_mass(0.0) <= target) return 0.0;
  if (atpf.tail_mass(kMaxTruncationRadius) > target) {
    throw std::runtime_error("truncation impossible: tail mass stays above " +
                             std::to_string(target) + " out to " +
                             std::to_string(kMaxTruncationRadius) + " m");
  }
  double lo = 0.0;
  double hi = kMaxTruncationRadius;
  while (hi - lo > 1e-9 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (atpf.tail_mass(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;  // the bound holds at hi by construction
}

/// Smallest concentric disk on which events must be simulated so that every
/// device inside `cell` sees at most `epsilon` expected omitted triggering
/// mass.
inline Window required_event_window(const Window& cell, const Atpf& atpf, double event_density,
                                    double epsilon) {
  if (cell.kind() != Window::Kind::disk) {
    throw std::invalid_argument("required_event_window: the device cell must be a disk");
  }
  return Window::disk(cell.center(),
                      cell.outer_radius() + truncation_radius(atpf, event_density, epsilon));
}

/// Per-device alarm probabilities for one (devices, events) pair, with the
/// truncation bookkeeping recorded alongside.
struct AlarmProbabilityField {
  std::vector<double> probabilities;  // aligned with devices.points
  double truncation_radius = 0.0;     // margin the event window actually guarantees
  double truncation_error_bound = 0.0;
  bool window_sufficient = true;  // false: event window smaller than required (non-fatal)
};

inline AlarmProbabilityField field_for_realization(const PointRealization& devices,
                                                   const PointRealization& events,
                                                   const Atpf& atpf, double epsilon = 1e-6) {
  AlarmProbabilityField field;

  // Margin guaranteed by the event window: how far beyond the device cell's
  // reach it still fully surrounds every possible device position.
  const Vec2 cell_center = devices.window.center();
  const double cell_reach = devices.window.circumradius();
  double margin = events.window.inscribed_radius_about(cell_center) - cell_reach;
  if (margin < 0.0) margin = 0.0;

  const double required = truncation_radius(atpf, events.density, epsilon);
  field.truncation_radius = margin;
  // slack at the bisection resolution: the margin is recovered from the
  // window geometry and may sit an ulp below the recomputed radius
  field.window_sufficient =
      margin + 1e-9 * (1.0 + margin) >= required || events.density == 0.0;
  const double omitted = 2.0 * kPi * events.density * atpf.tail_mass(margin);
  field.truncation_error_bound = omitted < 1.0 ? omitted : 1.0;

  field.probabilities.reserve(devices.points.size());
  for (const Vec2& d : devices.points) {
    field.probabilities.push_back(alarm_probability(d, events, atpf));
  }
  return field;
}

}  // namespace mtcsim
