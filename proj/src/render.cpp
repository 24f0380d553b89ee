#include "gsynth/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsynth/errors.hpp"

namespace gsynth {

Frame Frame::make(FrameKind kind, int w, int h) {
  Frame f;
  f.kind = kind;
  f.width = w;
  f.height = h;
  const auto n = static_cast<std::size_t>(w) * h;
  if (kind == FrameKind::Depth16) {
    f.depth.assign(n, 0);
  } else {
    f.rgb.assign(3 * n, 0);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Flipbook noise

FlipbookNoise::FlipbookNoise(const FlipbookLayout& layout, std::vector<double> values)
    : layout_(layout), values_(std::move(values)) {
  const auto expected = static_cast<std::size_t>(layout.tile_count) * layout.tile_px * layout.tile_px;
  if (values_.size() != expected) throw InvariantError("flipbook value count does not match layout");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("flipbook values must lie in [0, 1]");
  }
}

FlipbookNoise FlipbookNoise::generate(const FlipbookLayout& layout, std::uint64_t seed,
                                      int lattice_step) {
  const int px = layout.tile_px;
  const int cells = std::max(1, px / std::max(1, lattice_step));
  CounterRng rng(seed);
  std::vector<double> values(static_cast<std::size_t>(layout.tile_count) * px * px);
  std::vector<double> lattice(static_cast<std::size_t>(cells) * cells);
  for (int t = 0; t < layout.tile_count; ++t) {
    for (auto& l : lattice) l = rng.uniform01();
    auto node = [&](int i, int j) {
      return lattice[static_cast<std::size_t>((j % cells + cells) % cells) * cells +
                     (i % cells + cells) % cells];
    };
    for (int y = 0; y < px; ++y) {
      const double fy = static_cast<double>(y) * cells / px;
      const int j = static_cast<int>(fy);
      const double ty = fy - j;
      for (int x = 0; x < px; ++x) {
        const double fx = static_cast<double>(x) * cells / px;
        const int i = static_cast<int>(fx);
        const double tx = fx - i;
        const double top = node(i, j) + (node(i + 1, j) - node(i, j)) * tx;
        const double bottom = node(i, j + 1) + (node(i + 1, j + 1) - node(i, j + 1)) * tx;
        values[(static_cast<std::size_t>(t) * px + y) * px + x] =
            std::clamp(top + (bottom - top) * ty, 0.0, 1.0);
      }
    }
  }
  return FlipbookNoise(layout, std::move(values));
}

int FlipbookNoise::tile_for_frame(int frame_index) const {
  const int step = frame_index / layout_.frames_per_tile;
  return ((step % layout_.tile_count) + layout_.tile_count) % layout_.tile_count;
}

double FlipbookNoise::sample(int tile, int x, int y) const {
  const int px = layout_.tile_px;
  const int xi = ((x % px) + px) % px;
  const int yi = ((y % px) + px) % px;
  return values_[(static_cast<std::size_t>(tile) * px + yi) * px + xi];
}

// ---------------------------------------------------------------------------
// Ray casting

RayGrid::RayGrid(const CameraSpec& cam) : cam_(cam) {
  const int w = cam.resolution.width;
  const int h = cam.resolution.height;
  dirs_.resize(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) dirs_[static_cast<std::size_t>(v) * w + u] = camera_ray(cam, u, v).dir;
  }
}

namespace {

constexpr double kMinHit = 1e-6;

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal = Vec3::Zero();
};

bool hit_sphere(const Vec3& ro, const Vec3& rd, const Vec3& c, double r, double& t) {
  const Vec3 oc = ro - c;
  const double b = oc.dot(rd);
  const double cc = oc.dot(oc) - r * r;
  const double h = b * b - cc;
  if (h < 0.0) return false;
  const double sq = std::sqrt(h);
  double cand = -b - sq;
  if (cand <= kMinHit) cand = -b + sq;
  if (cand <= kMinHit) return false;
  t = cand;
  return true;
}

bool intersect(const Capsule& cap, const Vec3& ro, const Vec3& rd, Hit& hit) {
  const Vec3 ba = cap.b - cap.a;
  const double baba = ba.dot(ba);
  const double r = cap.radius;
  double best = std::numeric_limits<double>::infinity();

  if (baba > 1e-18) {
    const Vec3 oa = ro - cap.a;
    const double bard = ba.dot(rd);
    const double baoa = ba.dot(oa);
    const double rdoa = rd.dot(oa);
    const double oaoa = oa.dot(oa);
    const double a = baba - bard * bard;
    const double b = baba * rdoa - baoa * bard;
    const double c = baba * oaoa - baoa * baoa - r * r * baba;
    const double h = b * b - a * c;
    if (a > 1e-12 && h >= 0.0) {
      const double t = (-b - std::sqrt(h)) / a;
      const double y = baoa + t * bard;
      if (t > kMinHit && y > 0.0 && y < baba) best = t;
    }
  }
  double t = 0.0;
  if (hit_sphere(ro, rd, cap.a, r, t) && t < best) best = t;
  if (baba > 1e-18 && hit_sphere(ro, rd, cap.b, r, t) && t < best) best = t;
  if (!std::isfinite(best)) return false;

  const Vec3 p = ro + best * rd;
  Vec3 q = cap.a;
  if (baba > 1e-18) q += std::clamp((p - cap.a).dot(ba) / baba, 0.0, 1.0) * ba;
  hit.t = best;
  hit.normal = (p - q).normalized();
  return true;
}

bool intersect(const Plane& pl, const Vec3& ro, const Vec3& rd, Hit& hit) {
  const double denom = pl.normal.dot(rd);
  if (std::abs(denom) < 1e-12) return false;
  const double t = (pl.point - ro).dot(pl.normal) / denom;
  if (t <= kMinHit) return false;
  hit.t = t;
  hit.normal = denom < 0.0 ? pl.normal : Vec3(-pl.normal);
  return true;
}

bool intersect(const Box& box, const Vec3& ro, const Vec3& rd, Hit& hit) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  int axis = -1;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(rd[i]) < 1e-15) {
      if (ro[i] < box.min[i] || ro[i] > box.max[i]) return false;
      continue;
    }
    double a = (box.min[i] - ro[i]) / rd[i];
    double b = (box.max[i] - ro[i]) / rd[i];
    if (a > b) std::swap(a, b);
    if (a > t0) {
      t0 = a;
      axis = i;
    }
    t1 = std::min(t1, b);
  }
  if (axis < 0 || t0 > t1 || t0 <= kMinHit) return false;
  hit.t = t0;
  hit.normal = Vec3::Zero();
  hit.normal[axis] = rd[axis] > 0.0 ? -1.0 : 1.0;
  return true;
}

struct PixelRect {
  int u0, v0, u1, v1;  // inclusive-exclusive
};

PixelRect full_rect(const CameraSpec& cam) {
  return {0, 0, cam.resolution.width, cam.resolution.height};
}

// Conservative screen bounds from the projected corners of a world AABB.
PixelRect project_aabb(const CameraSpec& cam, const Vec3& lo, const Vec3& hi) {
  double umin = std::numeric_limits<double>::infinity(), vmin = umin;
  double umax = -umin, vmax = -umin;
  for (int c = 0; c < 8; ++c) {
    const Vec3 p((c & 1) ? hi.x() : lo.x(), (c & 2) ? hi.y() : lo.y(), (c & 4) ? hi.z() : lo.z());
    const auto proj = cam.project(p);
    if (!proj || (*proj).z() < 1e-3) return full_rect(cam);
    umin = std::min(umin, proj->x());
    umax = std::max(umax, proj->x());
    vmin = std::min(vmin, proj->y());
    vmax = std::max(vmax, proj->y());
  }
  const int w = cam.resolution.width;
  const int h = cam.resolution.height;
  PixelRect r;
  r.u0 = static_cast<int>(std::clamp(std::floor(umin) - 1.0, 0.0, static_cast<double>(w)));
  r.u1 = static_cast<int>(std::clamp(std::ceil(umax) + 2.0, 0.0, static_cast<double>(w)));
  r.v0 = static_cast<int>(std::clamp(std::floor(vmin) - 1.0, 0.0, static_cast<double>(h)));
  r.v1 = static_cast<int>(std::clamp(std::ceil(vmax) + 2.0, 0.0, static_cast<double>(h)));
  return r;
}

PixelRect screen_rect(const CameraSpec& cam, const Shape& shape) {
  if (const auto* c = std::get_if<Capsule>(&shape)) {
    const Vec3 r = Vec3::Constant(c->radius);
    return project_aabb(cam, c->a.cwiseMin(c->b) - r, c->a.cwiseMax(c->b) + r);
  }
  if (const auto* b = std::get_if<Box>(&shape)) return project_aabb(cam, b->min, b->max);
  return full_rect(cam);
}

}  // namespace

void trace_into(DepthBuffer& buf, const RayGrid& rays, std::span<const Primitive> prims) {
  const CameraSpec& cam = rays.camera();
  if (buf.width != cam.resolution.width || buf.height != cam.resolution.height) {
    throw InvariantError("depth buffer size does not match the camera");
  }
  const Vec3& ro = cam.position;
  for (const auto& prim : prims) {
    const PixelRect rect = screen_rect(cam, prim.shape);
    for (int v = rect.v0; v < rect.v1; ++v) {
      for (int u = rect.u0; u < rect.u1; ++u) {
        const Vec3& rd = rays.dir(u, v);
        Hit hit;
        const bool ok = std::visit([&](const auto& s) { return intersect(s, ro, rd, hit); }, prim.shape);
        if (!ok) continue;
        DepthSample& px = buf.at(u, v);
        if (px.valid() && !(hit.t < px.depth)) continue;
        px.depth = hit.t;
        px.tag = prim.tag;
        px.normal = hit.normal;
        px.facing = std::max(0.0, -hit.normal.dot(rd));
      }
    }
  }
}

DepthBuffer trace_depth(const Scene& scene, const CameraSpec& cam) {
  DepthBuffer buf(cam.resolution.width, cam.resolution.height);
  const RayGrid rays(cam);
  trace_into(buf, rays, scene.primitives);
  return buf;
}

// ---------------------------------------------------------------------------
// Depth sensor model

double depth_to_chromaticity(double depth, const SensorParams& sp) {
  if (!(depth > 0.0)) return 0.0;
  const double g = sp.chromaticity_coeff * (depth - sp.depth_min) / (sp.depth_max - sp.depth_min);
  return std::clamp(g, 0.0, 1.0);
}

std::uint16_t encode_depth16(double depth, const SensorParams& sp) {
  if (!(depth > 0.0)) return 0;
  const double g = depth_to_chromaticity(depth, sp);
  return static_cast<std::uint16_t>(1 + std::lround(g * 65534.0));
}

double decode_depth16(std::uint16_t code, const SensorParams& sp) {
  if (code == 0) return kInvalidDepth;
  const double g = (code - 1) / 65534.0;
  return sp.depth_min + g * (sp.depth_max - sp.depth_min) / sp.chromaticity_coeff;
}

DepthBuffer apply_depth_noise(const DepthBuffer& buf, const FlipbookNoise& noise,
                              const SensorParams& sp, int frame_index) {
  DepthBuffer out = buf;
  const int w = buf.width;
  const int h = buf.height;
  const int tile = noise.tile_for_frame(frame_index);
  const double span = sp.depth_max - sp.depth_min;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const DepthSample& s = buf.at(u, v);
      if (!s.valid()) continue;
      const DepthSample& l = buf.at(std::max(u - 1, 0), v);
      const DepthSample& r = buf.at(std::min(u + 1, w - 1), v);
      const DepthSample& t = buf.at(u, std::max(v - 1, 0));
      const DepthSample& b = buf.at(u, std::min(v + 1, h - 1));
      double edge = 1.0;
      if (l.valid() && r.valid() && t.valid() && b.valid()) {
        const double gx = 0.5 * (r.depth - l.depth);
        const double gy = 0.5 * (b.depth - t.depth);
        edge = std::min(1.0, std::sqrt(gx * gx + gy * gy) / sp.edge_scale);
      }
      const double z = std::clamp((s.depth - sp.depth_min) / span, 0.0, 1.0);
      const double intensity =
          std::clamp(sp.noise_dist_weight * z + sp.noise_edge_weight * edge, 0.0, 1.0);
      const double n = noise.sample(tile, u, v);
      DepthSample& o = out.at(u, v);
      if (intensity * n > sp.dropout_threshold) {
        o.depth = kInvalidDepth;
      } else {
        o.depth = s.depth + sp.depth_jitter * intensity * (2.0 * n - 1.0);
        if (!(o.depth > 0.0)) o.depth = kInvalidDepth;
      }
    }
  }
  return out;
}

Frame encode_depth_frame(const DepthBuffer& buf, const SensorParams& sp) {
  Frame f = Frame::make(FrameKind::Depth16, buf.width, buf.height);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    f.depth[i] = encode_depth16(buf.samples[i].depth, sp);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Infrared and RGB shading

double fresnel_factor(double facing_cos, double exponent) {
  return std::pow(1.0 - std::clamp(facing_cos, 0.0, 1.0), exponent);
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb lerp(Rgb a, Rgb b, double f) {
  return {to_byte(a.r + (b.r - a.r) * f), to_byte(a.g + (b.g - a.g) * f),
          to_byte(a.b + (b.b - a.b) * f)};
}

Rgb scale(Rgb c, double k) { return {to_byte(c.r * k), to_byte(c.g * k), to_byte(c.b * k)}; }

void put(Frame& f, std::size_t i, Rgb c) {
  f.rgb[3 * i] = c.r;
  f.rgb[3 * i + 1] = c.g;
  f.rgb[3 * i + 2] = c.b;
}

}  // namespace

Frame shade_infrared(const DepthBuffer& buf, const FlipbookNoise& noise, const SensorParams& sp,
                     int frame_index) {
  const int w = buf.width;
  const int h = buf.height;
  std::vector<Rgb> base(buf.samples.size());
  std::vector<double> fres(buf.samples.size(), 0.0);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    const DepthSample& s = buf.samples[i];
    if (!s.valid() || s.tag == SurfaceTag::None) continue;
    const double f = fresnel_factor(s.facing, sp.fresnel_exponent);
    fres[i] = f;
    base[i] = s.tag == SurfaceTag::Body ? lerp(kInfraredCenter, kInfraredEdge, f)
                                        : scale(kInfraredEnvironment, 0.4 + 0.6 * f);
  }

  Frame out = Frame::make(FrameKind::Ir8, w, h);
  const int half_tile = noise.layout().tile_px / 2;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      Rgb c = base[i];
      if (buf.samples[i].tag == SurfaceTag::Body && buf.samples[i].valid() && fres[i] > 0.6 &&
          sp.blur_radius > 0.0) {
        // Noise texture panned by one pixel per frame along (1, 1).
        const double nu = noise.sample(0, u + frame_index, v + frame_index);
        const double nv = noise.sample(0, u + frame_index + half_tile, v + frame_index + half_tile);
        const int su = std::clamp(u + static_cast<int>(std::lround(sp.blur_radius * (2.0 * nu - 1.0))), 0, w - 1);
        const int sv = std::clamp(v + static_cast<int>(std::lround(sp.blur_radius * (2.0 * nv - 1.0))), 0, h - 1);
        c = base[static_cast<std::size_t>(sv) * w + su];
      }
      put(out, i, c);
    }
  }
  return out;
}

Vec3 rgb_light_direction() { return Vec3(0.3, 0.8, -0.52).normalized(); }

Frame shade_rgb(const DepthBuffer& buf, const SensorParams& sp, double ambient) {
  (void)sp;
  Frame out = Frame::make(FrameKind::Rgb8, buf.width, buf.height);
  const Vec3 light = rgb_light_direction();
  const double a = std::clamp(ambient, 0.0, 1.0);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    const DepthSample& s = buf.samples[i];
    if (!s.valid() || s.tag == SurfaceTag::None) continue;
    const double k = a + (1.0 - a) * std::max(0.0, s.normal.dot(light));
    put(out, i, scale(s.tag == SurfaceTag::Body ? kSkinAlbedo : kInteriorAlbedo, k));
  }
  return out;
}

SensorParams effective_sensor(const SensorParams& base, const VariantParams& variant) {
  SensorParams sp = base;
  sp.chromaticity_coeff = variant.chromaticity_coeff;
  sp.depth_min = variant.depth_min;
  sp.depth_max = variant.depth_max;
  return sp;
}

// ---------------------------------------------------------------------------
// Sequences

Frame render_frame(const RecordingSetup& setup, int frame_index, const RayGrid& rays,
                   const DepthBuffer* static_layer, WarningCounters* warnings) {
  const CameraSpec& cam = *setup.camera;
  const FrameTarget target = evaluate_frame(*setup.timeline, frame_index, setup.scripts,
                                            *setup.rig, *setup.variant, warnings);
  const IkSolution ik = solve_two_bone_ik(*setup.rig, target.wrist_target);
  if (ik.clamped && warnings) ++warnings->ik_clamps;
  const PosedSkeleton posed = pose_hand(*setup.rig, ik.wrist, target.aim_dir, target.pose);
  const Scene scene = build_scene(*setup.rig, posed, setup.scene);

  DepthBuffer buf;
  if (static_layer) {
    buf = *static_layer;
    trace_into(buf, rays, std::span<const Primitive>(scene.primitives).subspan(scene.static_count));
  } else {
    buf = DepthBuffer(cam.resolution.width, cam.resolution.height);
    trace_into(buf, rays, scene.primitives);
  }

  const SensorParams sp = effective_sensor(cam.sensor, *setup.variant);
  Frame frame;
  switch (cam.kind) {
    case CameraKind::Depth:
      frame = encode_depth_frame(apply_depth_noise(buf, *setup.noise, sp, frame_index), sp);
      break;
    case CameraKind::Infrared:
      frame = shade_infrared(buf, *setup.noise, sp, frame_index);
      break;
    case CameraKind::Rgb:
      frame = shade_rgb(buf, sp, sp.ambient);
      break;
  }
  frame.frame_index = frame_index;
  frame.camera_id = cam.camera_id;
  return frame;
}

void render_sequence(const RecordingSetup& setup, const std::function<void(Frame&&)>& sink,
                     WarningCounters* warnings) {
  if (!setup.timeline || !setup.rig || !setup.camera || !setup.variant || !setup.noise) {
    throw InvariantError("render_sequence: incomplete recording setup");
  }
  const RayGrid rays(*setup.camera);
  const Scene statics = build_static_scene(*setup.rig, setup.scene);
  DepthBuffer layer(setup.camera->resolution.width, setup.camera->resolution.height);
  trace_into(layer, rays, statics.primitives);
  for (int f = 0; f < setup.timeline->total_frames; ++f) {
    sink(render_frame(setup, f, rays, &layer, warnings));
  }
}

std::vector<Frame> render_sequence(const RecordingSetup& setup, WarningCounters* warnings) {
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(setup.timeline ? setup.timeline->total_frames : 0));
  render_sequence(setup, [&](Frame&& f) { frames.push_back(std::move(f)); }, warnings);
  return frames;
}

}  // namespace gsynth
