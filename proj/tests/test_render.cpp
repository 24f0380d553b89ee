#include <doctest.h>

#include <random>

#include "gsynth/errors.hpp"
#include "gsynth/render.hpp"
#include "gsynth/scene.hpp"
#include "oracles.hpp"

using namespace gsynth;

namespace {

CameraSpec axis_camera(int w = 64, int h = 48, double fov = 60.0) {
  CameraSpec cam;
  cam.camera_id = "test";
  cam.position = Vec3::Zero();
  cam.fov_deg = fov;
  cam.resolution = {w, h};
  return cam;
}

Scene sphere_plane_scene(double sphere_z, double r, double plane_z) {
  Scene s;
  s.primitives.push_back({Capsule{Vec3(0, 0, sphere_z), Vec3(0, 0, sphere_z), r}, SurfaceTag::Body});
  if (plane_z != 0.0) s.primitives.push_back({Plane{Vec3(0, 0, plane_z), Vec3(0, 0, 1)}, SurfaceTag::Environment});
  return s;
}

SensorParams quiet_sensor() {
  SensorParams sp;
  sp.noise_dist_weight = 0.0;
  sp.noise_edge_weight = 0.0;
  return sp;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("sphere on the optical axis: center depth D - r") {
  const CameraSpec cam = axis_camera(65, 49);
  const DepthBuffer buf = trace_depth(sphere_plane_scene(-80.0, 10.0, 0.0), cam);
  CHECK(buf.at(32, 24).depth == doctest::Approx(70.0).epsilon(1e-12));
  CHECK(buf.at(32, 24).tag == SurfaceTag::Body);
  CHECK(buf.at(32, 24).normal.dot(Vec3(0, 0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("empty scene is all invalid") {
  const DepthBuffer buf = trace_depth(Scene{}, axis_camera());
  for (const auto& s : buf.samples) {
    CHECK_FALSE(s.valid());
    CHECK(s.tag == SurfaceTag::None);
  }
}

TEST_CASE("random capsules and boxes against a ray-march oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  const CameraSpec cam = axis_camera(24, 18, 70);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec3 a(10 * u(rng), 10 * u(rng), -60 + 10 * u(rng));
    const Vec3 b(10 * u(rng), 10 * u(rng), -60 + 10 * u(rng));
    const double r = 3 + 2 * std::abs(u(rng));
    const Vec3 lo(-15 + 5 * u(rng), -12, -95), hi(lo.x() + 12, 3, -85);
    Scene s;
    s.primitives.push_back({Capsule{a, b, r}, SurfaceTag::Body});
    s.primitives.push_back({Box{lo, hi}, SurfaceTag::Environment});
    const DepthBuffer buf = trace_depth(s, cam);
    auto sdf = [&](const Vec3& p) {
      return std::min(oracle::sdf_capsule(p, a, b, r), oracle::sdf_box(p, lo, hi));
    };
    for (int v = 0; v < 18; ++v) {
      for (int x = 0; x < 24; ++x) {
        const Ray ray = camera_ray(cam, x, v);
        const double t = oracle::ray_march(ray.origin, ray.dir, sdf, 1e-3, 200.0);
        if (std::isinf(t)) {
          CHECK_FALSE(buf.at(x, v).valid());
        } else {
          CHECK(std::abs(buf.at(x, v).depth - t) < 0.01);
        }
      }
    }
  }
}

TEST_CASE("chromaticity examples and monotonicity") {
  SensorParams sp;
  CHECK(depth_to_chromaticity(sp.depth_min, sp) == 0.0);
  CHECK(encode_depth16(sp.depth_min, sp) == 1);
  CHECK(depth_to_chromaticity(0.5 * (sp.depth_min + sp.depth_max), sp) == doctest::Approx(0.5));
  CHECK(depth_to_chromaticity(kInvalidDepth, sp) == 0.0);
  CHECK(encode_depth16(kInvalidDepth, sp) == 0);
  SensorParams c2 = sp;
  c2.chromaticity_coeff = 2.0;
  CHECK(depth_to_chromaticity(0.5 * (sp.depth_min + sp.depth_max), c2) == 1.0);
  double prev = -1.0;
  for (double d = sp.depth_min; d <= sp.depth_max; d += 0.173) {
    const double g = depth_to_chromaticity(d, sp);
    CHECK(g >= prev);
    prev = g;
  }
}

TEST_CASE("noise-off decoded depth within one quantization step of the analytic distance") {
  const CameraSpec cam = axis_camera(64, 48);
  const SensorParams sp = quiet_sensor();
  const Vec3 c(0, 0, -80);
  const double r = 15.0;
  const DepthBuffer buf = trace_depth(sphere_plane_scene(c.z(), r, 0.0), cam);
  const FlipbookNoise noise = FlipbookNoise::generate(sp.flipbook, 1);
  const Frame f = encode_depth_frame(apply_depth_noise(buf, noise, sp, 0), sp);
  const double q = (sp.depth_max - sp.depth_min) / 65534.0;
  int hits = 0;
  for (int v = 0; v < 48; ++v) {
    for (int u = 0; u < 64; ++u) {
      const Ray ray = camera_ray(cam, u, v);
      const double b = ray.dir.dot(ray.origin - c);
      const double disc = b * b - ((ray.origin - c).squaredNorm() - r * r);
      const std::uint16_t code = f.depth[static_cast<std::size_t>(v) * 64 + u];
      if (disc < 0) {
        CHECK(code == 0);
        continue;
      }
      ++hits;
      CHECK(std::abs(decode_depth16(code, sp) - (-b - std::sqrt(disc))) <= q + 1e-12);
    }
  }
  CHECK(hits > 100);
}

TEST_CASE("zero noise weights leave the buffer bit-identical") {
  const DepthBuffer buf = trace_depth(sphere_plane_scene(-60.0, 10.0, -120.0), axis_camera());
  const SensorParams sp = quiet_sensor();
  const FlipbookNoise noise = FlipbookNoise::generate(sp.flipbook, 99);
  const DepthBuffer out = apply_depth_noise(buf, noise, sp, 5);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) CHECK(out.samples[i].depth == buf.samples[i].depth);
}

TEST_CASE("flat plane at d_min has no interior dropout for any threshold") {
  SensorParams sp;
  DepthBuffer buf(64, 48);
  for (auto& s : buf.samples) s = {sp.depth_min, SurfaceTag::Environment, Vec3(0, 0, 1), 1.0};
  const FlipbookNoise noise = FlipbookNoise::generate(sp.flipbook, 4);
  for (double tau : {0.01, 0.5, 1.0}) {
    sp.dropout_threshold = tau;
    for (int f = 0; f < 8; ++f) {
      const DepthBuffer out = apply_depth_noise(buf, noise, sp, f);
      int dropped = 0;
      for (int v = 1; v < 47; ++v) {
        for (int u = 1; u < 63; ++u) dropped += !out.at(u, v).valid();
      }
      CHECK(dropped == 0);
    }
  }
}

TEST_CASE("flipbook is periodic with tile_count * frames_per_tile") {
  FlipbookLayout layout;
  const FlipbookNoise n = FlipbookNoise::generate(layout, 12345);
  const int period = layout.tile_count * layout.frames_per_tile;
  for (int f = 0; f < 3 * period; ++f) {
    for (int y = 0; y < 80; y += 7) {
      for (int x = 0; x < 80; x += 5) CHECK(n.at_frame(f, x, y) == n.at_frame(f + period, x, y));
    }
  }
  CHECK(n.tile_for_frame(0) == n.tile_for_frame(3));
  CHECK(n.tile_for_frame(3) != n.tile_for_frame(4));
  for (int t = 0; t < layout.tile_count; ++t) {
    for (int y = 0; y < layout.tile_px; ++y) {
      for (int x = 0; x < layout.tile_px; ++x) {
        const double v = n.sample(t, x, y);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
      }
    }
  }
}

TEST_CASE("dropout concentrates at silhouette edges") {
  const CameraSpec cam = axis_camera(160, 120);
  const SensorParams sp;
  const DepthBuffer clean = trace_depth(sphere_plane_scene(-60.0, 12.0, -145.0), cam);
  const FlipbookNoise noise = FlipbookNoise::generate(sp.flipbook, derive_seed(0, "sphere", 0, "test"));
  // Edge mask: within 2 px of a pixel whose 4-neighbour tag differs.
  std::vector<bool> edge(clean.samples.size(), false);
  for (int v = 0; v < 120; ++v) {
    for (int u = 0; u < 160; ++u) {
      bool boundary = false;
      for (auto [du, dv] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int uu = std::clamp(u + du, 0, 159), vv = std::clamp(v + dv, 0, 119);
        boundary |= clean.at(uu, vv).tag != clean.at(u, v).tag;
      }
      if (!boundary) continue;
      for (int dv = -2; dv <= 2; ++dv) {
        for (int du = -2; du <= 2; ++du) {
          const int uu = u + du, vv = v + dv;
          if (uu >= 0 && vv >= 0 && uu < 160 && vv < 120) edge[static_cast<std::size_t>(vv) * 160 + uu] = true;
        }
      }
    }
  }
  long edge_n = 0, edge_drop = 0, in_n = 0, in_drop = 0;
  for (int f = 0; f < 10; ++f) {
    const DepthBuffer out = apply_depth_noise(clean, noise, sp, f);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      if (!clean.samples[i].valid()) continue;
      const bool drop = !out.samples[i].valid();
      if (edge[i]) {
        ++edge_n;
        edge_drop += drop;
      } else {
        ++in_n;
        in_drop += drop;
      }
    }
  }
  const double edge_rate = static_cast<double>(edge_drop) / edge_n;
  const double in_rate = static_cast<double>(in_drop) / in_n;
  MESSAGE("edge dropout ", edge_rate, " interior ", in_rate);
  CHECK(edge_drop > 0);
  CHECK(edge_rate > 2.0 * in_rate);
}

TEST_CASE("Fresnel endpoints") {
  CHECK(fresnel_factor(1.0, 2.0) == 0.0);
  CHECK(fresnel_factor(0.0, 2.0) == 1.0);
  CHECK(fresnel_factor(0.5, 2.0) == 0.25);
  CHECK(fresnel_factor(0.0, 0.7) == 1.0);
  CHECK(fresnel_factor(1.0, 3.5) == 0.0);
}

TEST_CASE("infrared colors at the center and edge") {
  DepthBuffer buf(3, 1);
  buf.at(0, 0) = {50.0, SurfaceTag::Body, Vec3(0, 0, 1), 1.0};
  buf.at(1, 0) = {50.0, SurfaceTag::Body, Vec3(1, 0, 0), 0.0};
  buf.at(2, 0) = {50.0, SurfaceTag::Environment, Vec3(0, 0, 1), 1.0};
  SensorParams sp;
  sp.blur_radius = 0.0;
  const FlipbookNoise noise = FlipbookNoise::generate(sp.flipbook, 1);
  const Frame f = shade_infrared(buf, noise, sp, 0);
  CHECK(f.kind == FrameKind::Ir8);
  CHECK(Rgb{f.rgb[0], f.rgb[1], f.rgb[2]} == kInfraredCenter);
  CHECK(Rgb{f.rgb[3], f.rgb[4], f.rgb[5]} == kInfraredEdge);
  // Environment with F = 0 keeps 40% of the dark blue.
  CHECK(f.rgb[6] == static_cast<std::uint8_t>(std::lround(15 * 0.4)));
  CHECK(f.rgb[8] == static_cast<std::uint8_t>(std::lround(70 * 0.4)));
}

TEST_CASE("RGB Lambert shading") {
  DepthBuffer buf(2, 1);
  const Vec3 l = rgb_light_direction();
  Vec3 perp = l.cross(Vec3::UnitX()).normalized();
  buf.at(0, 0) = {50.0, SurfaceTag::Body, l, 1.0};
  buf.at(1, 0) = {50.0, SurfaceTag::Body, perp, 1.0};
  SensorParams sp;
  const Frame full = shade_rgb(buf, sp, 0.0);
  CHECK(Rgb{full.rgb[0], full.rgb[1], full.rgb[2]} == kSkinAlbedo);
  const Frame amb = shade_rgb(buf, sp, 0.2);
  CHECK(amb.rgb[3] == static_cast<std::uint8_t>(std::lround(224 * 0.2)));
  const Frame sat = shade_rgb(buf, sp, 1.0);
  CHECK(std::equal(sat.rgb.begin(), sat.rgb.begin() + 3, sat.rgb.begin() + 3));
}

TEST_CASE("camera rays") {
  CameraSpec cam = axis_camera(65, 49, 90.0);
  const Ray c = camera_ray(cam, 32, 24);
  CHECK((c.dir - cam.forward()).norm() < 1e-12);
  const Ray left = camera_ray(cam, 0, 24);
  const double ang = std::atan2(left.dir.x(), -left.dir.z()) * 180.0 / M_PI;
  CHECK(std::abs(ang + 45.0) < 90.0 / 65.0 / 2.0 + 1e-9);
  for (int v = 0; v < 49; v += 3) {
    for (int u = 0; u < 65; u += 3) CHECK(std::abs(camera_ray(cam, u, v).dir.norm() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(camera_ray(cam, 65, 0), InvariantError);
  CHECK_THROWS_AS(camera_ray(cam, 0, -1), InvariantError);
}

TEST_CASE("camera pose round trip and preset framing") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-100, 100);
  for (const auto& name : camera_preset_names()) {
    const CameraSpec cam = camera_preset(name, name, CameraKind::Depth, {320, 240}, 30.0);
    for (int i = 0; i < 50; ++i) {
      const Vec3 p(u(rng), u(rng), u(rng));
      CHECK((cam.camera_to_world(cam.world_to_camera(p)) - p).norm() < 1e-9);
    }
    const ArmRig rig;
    const auto px = cam.project(GesturePlacement::make_default(rig).anchor);
    REQUIRE(px.has_value());
    CHECK(px->x() > 80);
    CHECK(px->x() < 240);
    CHECK(px->y() > 60);
    CHECK(px->y() < 180);
  }
  CHECK(camera_preset_names().size() == 3);
  CHECK_THROWS_AS(camera_preset("dash", "x", CameraKind::Rgb, {320, 240}, 30), ConfigError);
}

TEST_CASE("scene determinism, tags and occlusion") {
  const ArmRig rig;
  const Vec3 wrist = rig.shoulder_pos + Vec3(0, 5, -40);
  const PosedSkeleton sk = pose_hand(rig, wrist, Vec3(0, 0.6, -0.8), hand_pose_preset("open_palm"));
  CHECK(build_scene(rig, sk) == build_scene(rig, sk));
  const Scene body_only = build_scene(rig, sk, {false, true});
  CHECK(body_only.count(SurfaceTag::Environment) == 0);
  CHECK(body_only.count(SurfaceTag::Body) == body_only.primitives.size());
  const Scene full = build_scene(rig, sk);
  CHECK(full.static_count == build_static_scene(rig).primitives.size());

  // Hand hidden behind the torso for a camera in front of the driver.
  const Vec3 behind = Vec3(0, 30, 25);
  const PosedSkeleton hidden = pose_hand(rig, behind, Vec3(0, 0, 1), hand_pose_preset("open_palm"));
  const Scene scene = build_scene(rig, hidden);
  CameraSpec cam = axis_camera(80, 60, 60.0);
  cam.position = Vec3(0, 30, -100);
  cam.rotation_deg = look_at_rotation(cam.position, behind);
  const auto px = cam.project(behind);
  REQUIRE(px.has_value());
  const DepthBuffer buf = trace_depth(scene, cam);
  const auto& s = buf.at(static_cast<int>(px->x()), static_cast<int>(px->y()));
  REQUIRE(s.valid());
  CHECK(s.depth < (behind - cam.position).norm() - 5.0);
}

TEST_CASE("render_sequence: static hold frames repeat and reruns are identical") {
  const ArmRig rig;
  const GesturePlacement place = GesturePlacement::make_default(rig);
  const auto reg = GestureRegistry::with_builtins();
  const std::vector<GestureScript> scripts{reg.at("peace_sign")};
  VariantParams v;
  v.chromaticity_coeff = 1.0;
  v.depth_min = 20.0;
  v.depth_max = 150.0;
  const Timeline tl = plan_timeline(scripts[0], place.rest_pos, place.anchor, 30.0, v);
  CameraSpec cam = camera_preset("infotainment", "depth0", CameraKind::Depth, {96, 72}, 30.0);
  cam.sensor.noise_dist_weight = 0.0;
  cam.sensor.noise_edge_weight = 0.0;
  const FlipbookNoise noise = FlipbookNoise::generate(cam.sensor.flipbook, 5);
  RecordingSetup setup{&tl, scripts, &rig, &cam, &v, &noise, {}};
  const auto frames = render_sequence(setup);
  CHECK(frames.size() == static_cast<std::size_t>(tl.total_frames));
  for (const auto& p : tl.phases) {
    if (p.kind != PhaseKind::Hold) continue;
    for (int f = p.start_frame + 1; f < p.end_frame; ++f) CHECK(frames[f].depth == frames[p.start_frame].depth);
  }
  CHECK(render_sequence(setup) == frames);

  // Full traces equal the cached static layer path.
  const RayGrid rays(cam);
  for (int f : {0, tl.total_frames / 2}) {
    CHECK(render_frame(setup, f, rays, nullptr) == frames[f]);
  }
}

}
