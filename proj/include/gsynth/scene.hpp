#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gsynth/common.hpp"
#include "gsynth/skeleton.hpp"

namespace gsynth {

enum class CameraKind { Rgb, Depth, Infrared };
std::string_view to_string(CameraKind k);
std::optional<CameraKind> parse_camera_kind(std::string_view s);

struct FlipbookLayout {
  int tile_px = 64;
  int tile_count = 8;
  int frames_per_tile = 4;
  friend bool operator==(const FlipbookLayout&, const FlipbookLayout&) = default;
};

/// Sensor-model constants. Depths in cm.
struct SensorParams {
  double chromaticity_coeff = 1.0;
  double depth_min = 20.0;
  double depth_max = 150.0;
  double noise_dist_weight = 0.3;
  double noise_edge_weight = 0.7;
  double edge_scale = 5.0;
  double dropout_threshold = 0.85;
  double depth_jitter = 1.0;
  FlipbookLayout flipbook;
  double fresnel_exponent = 2.0;
  double blur_radius = 2.0;  // px
  double ambient = 0.3;

  /// Throws ConfigError naming the offending field.
  void validate(const std::string& where) const;
  friend bool operator==(const SensorParams&, const SensorParams&) = default;
};

/// Pinhole camera looking along its local -Z with +Y up. `rotation_deg` is
/// (pitch about X, yaw about Y, roll about Z), composed as Ry * Rx * Rz.
struct CameraSpec {
  std::string camera_id = "depth0";
  CameraKind kind = CameraKind::Depth;
  bool active = true;
  Vec3 position = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();
  double fov_deg = 60.0;  // horizontal
  Resolution resolution;
  double fps = 30.0;
  SensorParams sensor;

  Mat3 rotation() const;
  Vec3 forward() const;
  double focal_px() const;
  Vec3 world_to_camera(const Vec3& p) const;
  Vec3 camera_to_world(const Vec3& p) const;
  /// Continuous pixel coordinates (u, v) plus camera-space depth along the
  /// optical axis; nullopt for points behind the camera.
  std::optional<Vec3> project(const Vec3& world) const;

  void validate() const;
  friend bool operator==(const CameraSpec&, const CameraSpec&) = default;
};

/// Euler angles (pitch, yaw, 0) that point the camera's -Z axis from `from` toward `to`.
Vec3 look_at_rotation(const Vec3& from, const Vec3& to);

/// Preset views of the default gesture anchor: "infotainment", "top", "wheel".
std::vector<std::string> camera_preset_names();
/// Throws ConfigError for unknown names.
CameraSpec camera_preset(std::string_view name, const std::string& camera_id, CameraKind kind,
                         Resolution res, double fps);

struct Ray {
  Vec3 origin;
  Vec3 dir;
};

/// Ray through the center of pixel (u, v); v grows downward.
/// Throws InvariantError for pixels outside the image.
Ray camera_ray(const CameraSpec& cam, int u, int v);

enum class SurfaceTag : unsigned char { None = 0, Body = 1, Environment = 2 };

struct Plane {
  Vec3 point;
  Vec3 normal;  // unit
};

struct Box {
  Vec3 min;
  Vec3 max;
};

using Shape = std::variant<Capsule, Plane, Box>;

struct Primitive {
  Shape shape;
  SurfaceTag tag = SurfaceTag::Body;
};

bool operator==(const Primitive& a, const Primitive& b);

/// Renderable world. The first `static_count` primitives do not depend on
/// the posed arm and can be cached across frames of one recording.
struct Scene {
  std::vector<Primitive> primitives;
  std::size_t static_count = 0;

  std::size_t count(SurfaceTag tag) const;
  friend bool operator==(const Scene&, const Scene&) = default;
};

struct SceneOptions {
  bool environment = true;
  /// Include the torso, head and the idle arm.
  bool character = true;
};

/// Static proxies (seat, dashboard, wheel, torso, head, idle arm) followed by
/// the posed arm and hand capsules.
Scene build_scene(const ArmRig& rig, const PosedSkeleton& posed, const SceneOptions& opts = {});

/// The static part of `build_scene`, shared by every frame of a recording.
Scene build_static_scene(const ArmRig& rig, const SceneOptions& opts = {});

}  // namespace gsynth
