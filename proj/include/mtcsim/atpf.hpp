// ============================================================================
// atpf.hpp -- Alarm-triggering probability functions.
//
// An Atpf maps the distance d (meters) between an event epicenter and a
// device to the probability f(d) in [0, 1] that the event pushes the device
// into alarm. Three shapes are supported:
//
//   exponential(scale)        f(d) = exp(-d / scale)
//   disk_step(threshold, l)   f(d) = l for d <= threshold, 0 beyond
//   custom_table(radii, v)    piecewise-linear through the knots, 0 beyond
//                             the last knot, constant before the first
//
// Each instance eagerly caches its radial first moment
//   I_f = integral_0^inf f(r) r dr   [m^2]
// which every closed-form rate expression needs, and exposes the tail
//   tail_mass(r0) = integral_{r0}^inf f(r) r dr
// used to certify event-window truncation. Closed forms are used where the
// shape admits them; the tabulated shape integrates by adaptive quadrature.
// Quadrature evaluations of the same integrals are exposed separately so the
// two routes can be cross-checked.
//
// Instances are immutable after construction and freely shareable across
// threads.
// ============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtcsim/quadrature.hpp"

namespace mtcsim {

/// Options for tabulated functions. allow_non_monotone accepts tables whose
/// values are not non-increasing; it requires an explicit integration_cutoff,
/// where the moment integrals stop and the caller vouches for anything
/// beyond.
struct AtpfTableOptions {
  bool allow_non_monotone = false;
  double integration_cutoff = std::numeric_limits<double>::quiet_NaN();
};

class Atpf {
 public:
  enum class Kind { exponential, disk_step, custom_table };

  using TableOptions = AtpfTableOptions;

  static Atpf exponential(double scale_m) {
    if (!std::isfinite(scale_m) || scale_m <= 0.0) {
      throw std::invalid_argument("Atpf::exponential: scale must be finite and > 0");
    }
    Atpf f;
    f.kind_ = Kind::exponential;
    f.scale_ = scale_m;
    f.first_moment_ = scale_m * scale_m;
    return f;
  }

  static Atpf disk_step(double threshold_m, double level) {
    if (!std::isfinite(threshold_m) || threshold_m < 0.0) {
      throw std::invalid_argument("Atpf::disk_step: threshold must be finite and >= 0");
    }
    if (!std::isfinite(level) || level < 0.0 || level > 1.0) {
      throw std::invalid_argument("Atpf::disk_step: level must lie in [0, 1]");
    }
    Atpf f;
    f.kind_ = Kind::disk_step;
    f.threshold_ = threshold_m;
    f.level_ = level;
    f.first_moment_ = 0.5 * level * threshold_m * threshold_m;
    return f;
  }

  static Atpf custom_table(std::vector<double> radii_m, std::vector<double> values,
                           TableOptions options = {}) {
    if (radii_m.empty() || radii_m.size() != values.size()) {
      throw std::invalid_argument("Atpf::custom_table: need equal, nonzero numbers of radii and values");
    }
    for (std::size_t i = 0; i < radii_m.size(); ++i) {
      if (!std::isfinite(radii_m[i]) || radii_m[i] < 0.0) {
        throw std::invalid_argument("Atpf::custom_table: radii must be finite and >= 0");
      }
      if (i > 0 && radii_m[i] <= radii_m[i - 1]) {
        throw std::invalid_argument("Atpf::custom_table: radii must be strictly ascending");
      }
      if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0) {
        throw std::invalid_argument("Atpf::custom_table: values must lie in [0, 1]");
      }
      if (!options.allow_non_monotone && i > 0 && values[i] > values[i - 1]) {
        throw std::invalid_argument(
            "Atpf::custom_table: values must be non-increasing in radius; set "
            "TableOptions.allow_non_monotone (with an explicit integration_cutoff) to override");
      }
    }
    if (options.allow_non_monotone &&
        (!std::isfinite(options.integration_cutoff) || options.integration_cutoff <= 0.0)) {
      throw std::invalid_argument(
          "Atpf::custom_table: allow_non_monotone requires a finite, positive integration_cutoff");
    }
    Atpf f;
    f.kind_ = Kind::custom_table;
    f.radii_ = std::move(radii_m);
    f.values_ = std::move(values);
    f.table_cutoff_ = options.allow_non_monotone
                          ? std::min(options.integration_cutoff, f.radii_.back())
                          : f.radii_.back();
    f.first_moment_ = f.radial_integral_by_quadrature(0.0, kDefaultQuadTol);
    return f;
  }

  /// Load a table from a two-column CSV (radius_m, probability). A header
  /// row is required.
  static Atpf custom_table_from_csv(const std::string& path, TableOptions options = {}) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("Atpf: cannot open ATPF table '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error("Atpf: ATPF table '" + path + "' is empty");
    }
    double a = 0.0, b = 0.0;
    if (parse_row(line, a, b)) {
      throw std::runtime_error("Atpf: ATPF table '" + path +
                               "' must start with a header row, found numeric data");
    }
    std::vector<double> radii, values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      if (!parse_row(line, a, b)) {
        throw std::runtime_error("Atpf: ATPF table '" + path + "' line " +
                                 std::to_string(line_no) + ": expected 'radius,probability'");
      }
      radii.push_back(a);
      values.push_back(b);
    }
    return custom_table(std::move(radii), std::move(values), options);
  }

  /// Evaluate f(d).
  double operator()(double distance_m) const {
    if (!std::isfinite(distance_m) || distance_m < 0.0) {
      throw std::invalid_argument("Atpf: distance must be finite and >= 0");
    }
    switch (kind_) {
      case Kind::exponential:
        return std::exp(-distance_m / scale_);
      case Kind::disk_step:
        return distance_m <= threshold_ ? level_ : 0.0;
      case Kind::custom_table:
        return table_value(distance_m);
    }
    return 0.0;
  }

  /// Cached I_f = integral_0^inf f(r) r dr.
  double first_moment_integral() const { return first_moment_; }

  /// integral_{r0}^inf f(r) r dr, closed form where available.
  double tail_mass(double r0) const {
    if (!std::isfinite(r0) || r0 < 0.0) {
      throw std::invalid_argument("Atpf::tail_mass: r0 must be finite and >= 0");
    }
    switch (kind_) {
      case Kind::exponential:
        // antiderivative of r e^{-r/s} gives (1 + r0/s) s^2 e^{-r0/s}
        return (1.0 + r0 / scale_) * scale_ * scale_ * std::exp(-r0 / scale_);
      case Kind::disk_step:
        if (r0 >= threshold_) return 0.0;
        return 0.5 * level_ * (threshold_ * threshold_ - r0 * r0);
      case Kind::custom_table:
        return radial_integral_by_quadrature(r0, kDefaultQuadTol);
    }
    return 0.0;
  }

  /// Distance beyond which f < 1e-18. Pairwise passes may drop farther
  /// contributions; the induced error is below double rounding noise.
  double negligible_radius() const {
    switch (kind_) {
      case Kind::exponential:
        return scale_ * kLogHuge;  // exp(-kLogHuge) = 1e-18
      case Kind::disk_step:
        return threshold_;
      case Kind::custom_table:
        return radii_.back();
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  double threshold() const { return threshold_; }
  double level() const { return level_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }

  // --------------------------------------------------------------------
  // Quadrature route. Independent of the closed forms above; used to
  // cross-validate them.
  // --------------------------------------------------------------------
  double first_moment_by_quadrature(double abs_tol = kDefaultQuadTol) const {
    return radial_integral_by_quadrature(0.0, abs_tol);
  }

  double tail_mass_by_quadrature(double r0, double abs_tol = kDefaultQuadTol) const {
    if (!std::isfinite(r0) || r0 < 0.0) {
      throw std::invalid_argument("Atpf::tail_mass_by_quadrature: r0 must be finite and >= 0");
    }
    return radial_integral_by_quadrature(r0, abs_tol);
  }

 private:
  static constexpr double kDefaultQuadTol = 1e-10;
  static constexpr double kLogHuge = 41.44653167389282;  // -ln(1e-18)

  Atpf() = default;

  static bool parse_row(const std::string& line, double& a, double& b) {
    std::istringstream ss(line);
    std::string first, second, extra;
    if (!std::getline(ss, first, ',') || !std::getline(ss, second, ',')) return false;
    if (std::getline(ss, extra, ',') && extra.find_first_not_of(" \t\r\n") != std::string::npos) {
      return false;
    }
    try {
      std::size_t pos = 0;
      a = std::stod(first, &pos);
      if (first.find_first_not_of(" \t\r\n", pos) != std::string::npos) return false;
      b = std::stod(second, &pos);
      if (second.find_first_not_of(" \t\r\n", pos) != std::string::npos) return false;
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }

  double table_value(double d) const {
    if (d <= radii_.front()) return values_.front();
    if (d >= radii_.back()) return d == radii_.back() ? values_.back() : 0.0;
    const auto it = std::upper_bound(radii_.begin(), radii_.end(), d);
    const std::size_t hi = static_cast<std::size_t>(it - radii_.begin());
    const std::size_t lo = hi - 1;
    const double t = (d - radii_[lo]) / (radii_[hi] - radii_[lo]);
    return values_[lo] + t * (values_[hi] - values_[lo]);
  }

  /// integral_{r_lo}^inf f(r) r dr by adaptive panels. Finite-support
  /// shapes integrate to their support end, knot by knot so panel edges
  /// align with the kinks. The exponential shape grows the upper limit in
  /// octaves until two consecutive octaves contribute less than tol/16;
  /// failure to get there signals a non-integrable function.
  double radial_integral_by_quadrature(double r_lo, double abs_tol) const {
    const auto integrand = [this](double r) { return (*this)(r)*r; };
    if (kind_ != Kind::exponential) {
      const double end = kind_ == Kind::disk_step ? threshold_ : table_cutoff_;
      if (r_lo >= end) return 0.0;
      double total = 0.0;
      if (kind_ == Kind::custom_table) {
        // split at the knots
        std::vector<double> cuts{r_lo};
        for (double r : radii_) {
          if (r > r_lo && r < end) cuts.push_back(r);
        }
        cuts.push_back(end);
        const double seg_tol = abs_tol / static_cast<double>(cuts.size());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
          const auto res = integrate_adaptive(integrand, cuts[i], cuts[i + 1], seg_tol);
          if (!res.converged) throw std::runtime_error("Atpf: non-integrable ATPF");
          total += res.value;
        }
      } else {
        const auto res = integrate_adaptive(integrand, r_lo, end, abs_tol);
        if (!res.converged) throw std::runtime_error("Atpf: non-integrable ATPF");
        total = res.value;
      }
      return total;
    }

    double seg_start = r_lo;
    double seg_end = std::max({2.0 * scale_, r_lo + scale_, 1.0});
    double total = 0.0;
    int quiet_octaves = 0;
    for (int i = 0; i < 64; ++i) {
      const auto res = integrate_adaptive(integrand, seg_start, seg_end, abs_tol / 8.0);
      if (!res.converged) throw std::runtime_error("Atpf: non-integrable ATPF");
      total += res.value;
      quiet_octaves = std::fabs(res.value) < abs_tol / 16.0 ? quiet_octaves + 1 : 0;
      if (quiet_octaves >= 2) return total;
      seg_start = seg_end;
      seg_end *= 2.0;
    }
    throw std::runtime_error("Atpf: non-integrable ATPF (tail did not converge)");
  }

  Kind kind_ = Kind::exponential;
  double scale_ = 1.0;
  double threshold_ = 0.0;
  double level_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> values_;
  double table_cutoff_ = 0.0;
  double first_moment_ = 0.0;
};

}  // namespace mtcsim
