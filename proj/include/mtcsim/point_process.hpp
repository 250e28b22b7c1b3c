// ============================================================================
// point_process.hpp -- Homogeneous Poisson point processes on planar windows.
//
// A realization is drawn constructively and exactly: the point count is
// Poisson(density * area) and, given the count, positions are i.i.d. uniform
// over the window. A fixed-count variant (binomial point process) is also
// provided for experiments that condition on the number of points.
// ============================================================================
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mtcsim/geometry.hpp"
#include "mtcsim/random.hpp"

namespace mtcsim {

/// A sampled set of locations together with the window and density that
/// produced it. density == 0 implies an empty point set.
struct PointRealization {
  std::vector<Vec2> points;
  Window window;
  double density = 0.0;
};

/// Draw one realization of a homogeneous Poisson point process.
/// Sampling is pure given the stream: identical (density, window, stream
/// state) reproduce the realization bit for bit.
inline PointRealization sample_ppp(double density, const Window& window, RngStream& rng) {
  if (!std::isfinite(density) || density < 0.0) {
    throw std::invalid_argument("sample_ppp: density must be finite and >= 0");
  }
  const std::uint64_t n = sample_poisson(density * window.area(), rng);
  PointRealization out{{}, window, density};
  out.points.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    out.points.push_back(window.sample(rng));
  }
  return out;
}

/// Binomial point process: exactly `count` i.i.d. uniform points. The
/// recorded density is count / area so downstream mass accounting stays
/// meaningful.
inline PointRealization sample_fixed_count(std::size_t count, const Window& window,
                                           RngStream& rng) {
  PointRealization out{{}, window, static_cast<double>(count) / window.area()};
  out.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.points.push_back(window.sample(rng));
  }
  return out;
}

}  // namespace mtcsim
