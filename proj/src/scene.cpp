#include "gsynth/scene.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsynth/errors.hpp"
#include "gsynth/gesture.hpp"

namespace gsynth {

std::string_view to_string(CameraKind k) {
  switch (k) {
    case CameraKind::Rgb: return "rgb";
    case CameraKind::Depth: return "depth";
    case CameraKind::Infrared: return "infrared";
  }
  return "depth";
}

std::optional<CameraKind> parse_camera_kind(std::string_view s) {
  if (s == "rgb") return CameraKind::Rgb;
  if (s == "depth") return CameraKind::Depth;
  if (s == "infrared" || s == "ir") return CameraKind::Infrared;
  return std::nullopt;
}

void SensorParams::validate(const std::string& where) const {
  auto fail = [&](const std::string& field, const std::string& what) {
    throw ConfigError(where + ".sensor." + field + ": " + what);
  };
  if (!(chromaticity_coeff > 0.0)) fail("chromaticity_coeff", "must be > 0");
  if (!(depth_min > 0.0)) fail("depth_min", "must be > 0");
  if (!(depth_min < depth_max)) fail("depth_max", "must exceed depth_min");
  if (noise_dist_weight < 0.0) fail("noise_dist_weight", "must be >= 0");
  if (noise_edge_weight < 0.0) fail("noise_edge_weight", "must be >= 0");
  if (!(edge_scale > 0.0)) fail("edge_scale", "must be > 0");
  if (!(dropout_threshold > 0.0 && dropout_threshold <= 1.0)) {
    fail("dropout_threshold", "must lie in (0, 1]");
  }
  if (depth_jitter < 0.0) fail("depth_jitter", "must be >= 0");
  if (flipbook.tile_px < 1) fail("flipbook.tile_px", "must be >= 1");
  if (flipbook.tile_count < 1) fail("flipbook.tile_count", "must be >= 1");
  if (flipbook.frames_per_tile < 1) fail("flipbook.frames_per_tile", "must be >= 1");
  if (!(fresnel_exponent > 0.0)) fail("fresnel_exponent", "must be > 0");
  if (blur_radius < 0.0) fail("blur_radius", "must be >= 0");
  if (!(ambient >= 0.0 && ambient <= 1.0)) fail("ambient", "must lie in [0, 1]");
}

Mat3 CameraSpec::rotation() const {
  using Eigen::AngleAxisd;
  return (AngleAxisd(deg_to_rad(rotation_deg.y()), Vec3::UnitY()) *
          AngleAxisd(deg_to_rad(rotation_deg.x()), Vec3::UnitX()) *
          AngleAxisd(deg_to_rad(rotation_deg.z()), Vec3::UnitZ()))
      .toRotationMatrix();
}

Vec3 CameraSpec::forward() const { return rotation() * Vec3(0.0, 0.0, -1.0); }

double CameraSpec::focal_px() const {
  return 0.5 * resolution.width / std::tan(0.5 * deg_to_rad(fov_deg));
}

Vec3 CameraSpec::world_to_camera(const Vec3& p) const {
  return rotation().transpose() * (p - position);
}

Vec3 CameraSpec::camera_to_world(const Vec3& p) const { return rotation() * p + position; }

std::optional<Vec3> CameraSpec::project(const Vec3& world) const {
  const Vec3 c = world_to_camera(world);
  const double z = -c.z();
  if (z <= 1e-9) return std::nullopt;
  const double f = focal_px();
  const double u = 0.5 * resolution.width + f * c.x() / z - 0.5;
  const double v = 0.5 * resolution.height - f * c.y() / z - 0.5;
  return Vec3(u, v, z);
}

void CameraSpec::validate() const {
  const std::string where = "cameras[" + camera_id + "]";
  if (camera_id.empty()) throw ConfigError("cameras: id must not be empty");
  if (!(fov_deg >= 10.0 && fov_deg <= 170.0)) {
    throw ConfigError(where + ".fov_deg: must lie in [10, 170]");
  }
  if (resolution.width < 16 || resolution.height < 16) {
    throw ConfigError(where + ".resolution: must be at least 16x16");
  }
  if (!(fps >= 1.0)) throw ConfigError(where + ".fps: must be >= 1");
  if (!position.allFinite() || !rotation_deg.allFinite()) {
    throw ConfigError(where + ".position: must be finite");
  }
  sensor.validate(where);
}

Vec3 look_at_rotation(const Vec3& from, const Vec3& to) {
  const Vec3 d = (to - from).normalized();
  const double pitch = std::asin(std::clamp(d.y(), -1.0, 1.0));
  const double yaw = std::atan2(-d.x(), -d.z());
  return Vec3(rad_to_deg(pitch), rad_to_deg(yaw), 0.0);
}

namespace {

struct PresetPose {
  std::string_view name;
  Vec3 position;
};

// Camera positions in the world frame of the default right-hand rig; each
// preset aims at the default gesture anchor.
const std::array<PresetPose, 3>& presets() {
  static const std::array<PresetPose, 3> kPresets = {{
      {"infotainment", Vec3(38.0, 38.0, -88.0)},
      {"top", Vec3(18.0, 105.0, -30.0)},
      {"wheel", Vec3(5.0, 42.0, -86.0)},
  }};
  return kPresets;
}

}  // namespace

std::vector<std::string> camera_preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.emplace_back(p.name);
  return out;
}

CameraSpec camera_preset(std::string_view name, const std::string& camera_id, CameraKind kind,
                         Resolution res, double fps) {
  const ArmRig rig = ArmRig::make_default();
  const Vec3 anchor = GesturePlacement::make_default(rig).anchor;
  for (const auto& p : presets()) {
    if (p.name != name) continue;
    CameraSpec cam;
    cam.camera_id = camera_id;
    cam.kind = kind;
    cam.position = p.position;
    cam.rotation_deg = look_at_rotation(p.position, anchor);
    cam.fov_deg = 65.0;
    cam.resolution = res;
    cam.fps = fps;
    return cam;
  }
  throw ConfigError("cameras: unknown preset '" + std::string(name) + "'");
}

Ray camera_ray(const CameraSpec& cam, int u, int v) {
  const int w = cam.resolution.width;
  const int h = cam.resolution.height;
  if (u < 0 || u >= w || v < 0 || v >= h) {
    throw InvariantError("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                         ") outside the image");
  }
  const double f = cam.focal_px();
  const Vec3 local(u + 0.5 - 0.5 * w, 0.5 * h - (v + 0.5), -f);
  return {cam.position, (cam.rotation() * local).normalized()};
}

bool operator==(const Primitive& a, const Primitive& b) {
  if (a.tag != b.tag || a.shape.index() != b.shape.index()) return false;
  return std::visit(
      [&](const auto& sa) {
        using T = std::decay_t<decltype(sa)>;
        const auto& sb = std::get<T>(b.shape);
        if constexpr (std::is_same_v<T, Capsule>) {
          return sa == sb;
        } else if constexpr (std::is_same_v<T, Plane>) {
          return sa.point == sb.point && sa.normal == sb.normal;
        } else {
          return sa.min == sb.min && sa.max == sb.max;
        }
      },
      a.shape);
}

std::size_t Scene::count(SurfaceTag tag) const {
  return static_cast<std::size_t>(std::count_if(
      primitives.begin(), primitives.end(), [&](const Primitive& p) { return p.tag == tag; }));
}

namespace {

void add_environment(Scene& scene) {
  auto env = [&](Shape s) { scene.primitives.push_back({std::move(s), SurfaceTag::Environment}); };
  // Seat back and cushion.
  env(Box{Vec3(-25.0, -5.0, 18.0), Vec3(25.0, 75.0, 28.0)});
  env(Box{Vec3(-25.0, -15.0, -30.0), Vec3(25.0, -5.0, 25.0)});
  // Dashboard.
  env(Box{Vec3(-60.0, -10.0, -120.0), Vec3(90.0, 22.0, -93.0)});
  // Steering wheel rim and column.
  const Vec3 wheel_center(0.0, 30.0, -28.0);
  constexpr int kRimSegments = 12;
  constexpr double kRimRadius = 9.0;
  for (int i = 0; i < kRimSegments; ++i) {
    const double a0 = 2.0 * std::numbers::pi * i / kRimSegments;
    const double a1 = 2.0 * std::numbers::pi * (i + 1) / kRimSegments;
    env(Capsule{wheel_center + kRimRadius * Vec3(std::cos(a0), std::sin(a0), 0.0),
                wheel_center + kRimRadius * Vec3(std::cos(a1), std::sin(a1), 0.0), 1.4});
  }
  env(Capsule{wheel_center, Vec3(0.0, 15.0, -93.0), 3.0});
  // Floor and rear wall.
  env(Plane{Vec3(0.0, -40.0, 0.0), Vec3(0.0, 1.0, 0.0)});
  env(Plane{Vec3(0.0, 0.0, 120.0), Vec3(0.0, 0.0, -1.0)});
}

void add_character(Scene& scene, const ArmRig& rig) {
  auto body = [&](Shape s) { scene.primitives.push_back({std::move(s), SurfaceTag::Body}); };
  body(Capsule{Vec3(0.0, 5.0, 3.0), Vec3(0.0, 38.0, 3.0), 14.0});
  body(Capsule{Vec3(0.0, 62.0, 0.0), Vec3(0.0, 62.0, 0.0), 10.0});
  body(Capsule{Vec3(0.0, 45.0, 2.0), Vec3(0.0, 52.0, 1.0), 5.0});

  // The idle arm rests on the wheel.
  const ArmRig idle = rig.mirrored();
  const Vec3 rest = GesturePlacement::make_default(idle).rest_pos;
  HandPose fist;
  fist.curl = {60.0, 90.0, 90.0, 90.0, 90.0};
  fist.preset_name = "fist";
  const PosedSkeleton sk = pose_hand(idle, rest, Vec3(0.0, 0.2, -1.0).normalized(), fist);
  for (const auto& c : sk.capsules) body(c);
}

}  // namespace

Scene build_static_scene(const ArmRig& rig, const SceneOptions& opts) {
  Scene scene;
  if (opts.environment) add_environment(scene);
  if (opts.character) add_character(scene, rig);
  scene.static_count = scene.primitives.size();
  return scene;
}

Scene build_scene(const ArmRig& rig, const PosedSkeleton& posed, const SceneOptions& opts) {
  Scene scene = build_static_scene(rig, opts);
  for (const auto& c : posed.capsules) scene.primitives.push_back({c, SurfaceTag::Body});
  return scene;
}

}  // namespace gsynth
