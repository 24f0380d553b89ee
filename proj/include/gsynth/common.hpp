#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace gsynth {

/// World-space vector in centimeters. Right-handed, +Y up; the seated
/// character faces -Z.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Resolution {
  int width = 320;
  int height = 240;
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Mirror across the YZ plane (x -> -x). Exact in floating point.
inline Vec3 mirror_x(const Vec3& v) { return Vec3(-v.x(), v.y(), v.z()); }

/// Counters for recoverable clamps that occur while generating a recording.
struct WarningCounters {
  int ik_clamps = 0;
  int arc_clamps = 0;

  WarningCounters& operator+=(const WarningCounters& o) {
    ik_clamps += o.ik_clamps;
    arc_clamps += o.arc_clamps;
    return *this;
  }
  friend bool operator==(const WarningCounters&, const WarningCounters&) = default;
};

}  // namespace gsynth
