// geometry.hpp : planar vectors and bounded sampling windows.
#pragma once

#include <cmath>
#include <stdexcept>

#include "mtcsim/random.hpp"

namespace mtcsim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(Vec2 a, Vec2 b) { return std::sqrt(squared_distance(a, b)); }

/// Bounded planar window: disk, annulus, or axis-aligned rectangle.
/// Construction validates the geometry; instances are immutable.
class Window {
 public:
  enum class Kind { disk, annulus, rectangle };

  static Window disk(Vec2 center, double radius) {
    require(std::isfinite(radius) && radius > 0.0, "disk radius must be finite and > 0");
    Window w;
    w.kind_ = Kind::disk;
    w.center_ = center;
    w.r_outer_ = radius;
    return w;
  }

  static Window annulus(Vec2 center, double r_inner, double r_outer) {
    require(std::isfinite(r_inner) && std::isfinite(r_outer) && r_inner >= 0.0 &&
                r_outer > r_inner,
            "annulus requires r_outer > r_inner >= 0");
    Window w;
    w.kind_ = Kind::annulus;
    w.center_ = center;
    w.r_inner_ = r_inner;
    w.r_outer_ = r_outer;
    return w;
  }

  static Window rectangle(Vec2 corner_min, Vec2 corner_max) {
    require(std::isfinite(corner_min.x) && std::isfinite(corner_max.x) &&
                std::isfinite(corner_min.y) && std::isfinite(corner_max.y) &&
                corner_max.x > corner_min.x && corner_max.y > corner_min.y,
            "rectangle corner_max must strictly dominate corner_min");
    Window w;
    w.kind_ = Kind::rectangle;
    w.lo_ = corner_min;
    w.hi_ = corner_max;
    w.center_ = {0.5 * (corner_min.x + corner_max.x), 0.5 * (corner_min.y + corner_max.y)};
    return w;
  }

  Kind kind() const { return kind_; }
  Vec2 center() const { return center_; }

  double area() const {
    switch (kind_) {
      case Kind::disk:
        return kPi * r_outer_ * r_outer_;
      case Kind::annulus:
        return kPi * (r_outer_ * r_outer_ - r_inner_ * r_inner_);
      case Kind::rectangle:
        return (hi_.x - lo_.x) * (hi_.y - lo_.y);
    }
    return 0.0;
  }

  /// Boundary-inclusive membership.
  bool contains(Vec2 p) const {
    switch (kind_) {
      case Kind::disk: {
        return squared_distance(p, center_) <= r_outer_ * r_outer_;
      }
      case Kind::annulus: {
        const double d2 = squared_distance(p, center_);
        return d2 >= r_inner_ * r_inner_ && d2 <= r_outer_ * r_outer_;
      }
      case Kind::rectangle:
        return p.x >= lo_.x && p.x <= hi_.x && p.y >= lo_.y && p.y <= hi_.y;
    }
    return false;
  }

  /// Largest rho such that the disk of radius rho about c lies inside the
  /// window. Negative when no such disk exists (c outside, or inside the
  /// hole of an annulus).
  double inscribed_radius_about(Vec2 c) const {
    switch (kind_) {
      case Kind::disk:
        return r_outer_ - distance(c, center_);
      case Kind::annulus: {
        const double d = distance(c, center_);
        return std::min(r_outer_ - d, d - r_inner_);
      }
      case Kind::rectangle:
        return std::min(std::min(c.x - lo_.x, hi_.x - c.x), std::min(c.y - lo_.y, hi_.y - c.y));
    }
    return -1.0;
  }

  bool contains_disk(Vec2 c, double rho) const { return inscribed_radius_about(c) >= rho; }

  /// Distance from the window center to its farthest point.
  double circumradius() const {
    switch (kind_) {
      case Kind::disk:
      case Kind::annulus:
        return r_outer_;
      case Kind::rectangle:
        return 0.5 * std::sqrt((hi_.x - lo_.x) * (hi_.x - lo_.x) +
                               (hi_.y - lo_.y) * (hi_.y - lo_.y));
    }
    return 0.0;
  }

  double outer_radius() const {
    require(kind_ != Kind::rectangle, "outer_radius is defined for disk and annulus windows");
    return r_outer_;
  }

  double inner_radius() const {
    require(kind_ == Kind::annulus, "inner_radius is defined for annulus windows");
    return r_inner_;
  }

  Vec2 corner_min() const {
    require(kind_ == Kind::rectangle, "corner_min is defined for rectangle windows");
    return lo_;
  }

  Vec2 corner_max() const {
    require(kind_ == Kind::rectangle, "corner_max is defined for rectangle windows");
    return hi_;
  }

  /// One point, uniform over the window. Disk and annulus use inverse-CDF
  /// radial sampling: r = sqrt(u * (r_out^2 - r_in^2) + r_in^2).
  Vec2 sample(RngStream& rng) const {
    switch (kind_) {
      case Kind::disk:
      case Kind::annulus: {
        const double u = rng.uniform01();
        const double r =
            std::sqrt(u * (r_outer_ * r_outer_ - r_inner_ * r_inner_) + r_inner_ * r_inner_);
        const double theta = 2.0 * kPi * rng.uniform01();
        return {center_.x + r * std::cos(theta), center_.y + r * std::sin(theta)};
      }
      case Kind::rectangle: {
        const double x = lo_.x + (hi_.x - lo_.x) * rng.uniform01();
        const double y = lo_.y + (hi_.y - lo_.y) * rng.uniform01();
        return {x, y};
      }
    }
    return {};
  }

 private:
  Window() = default;

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("Window: ") + msg);
  }

  Kind kind_ = Kind::disk;
  Vec2 center_{};
  double r_inner_ = 0.0;
  double r_outer_ = 0.0;
  Vec2 lo_{};
  Vec2 hi_{};
};

}  // namespace mtcsim
