#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsynth/common.hpp"
#include "gsynth/gesture.hpp"
#include "gsynth/scene.hpp"
#include "gsynth/variation.hpp"

namespace gsynth {

inline constexpr double kInvalidDepth = 0.0;

struct DepthSample {
  double depth = kInvalidDepth;  // cm along the ray; kInvalidDepth when there is no data
  SurfaceTag tag = SurfaceTag::None;
  Vec3 normal = Vec3::Zero();
  /// max(0, n . v) with v the unit direction back to the camera.
  double facing = 0.0;

  bool valid() const { return depth > 0.0; }
};

struct DepthBuffer {
  int width = 0;
  int height = 0;
  std::vector<DepthSample> samples;

  DepthBuffer() = default;
  DepthBuffer(int w, int h) : width(w), height(h), samples(static_cast<std::size_t>(w) * h) {}

  DepthSample& at(int u, int v) { return samples[static_cast<std::size_t>(v) * width + u]; }
  const DepthSample& at(int u, int v) const {
    return samples[static_cast<std::size_t>(v) * width + u];
  }
};

enum class FrameKind { Depth16, Rgb8, Ir8 };

/// Depth16 frames fill `depth`; Rgb8/Ir8 frames fill `rgb` (interleaved).
struct Frame {
  FrameKind kind = FrameKind::Depth16;
  int width = 0;
  int height = 0;
  int frame_index = 0;
  std::string camera_id;
  std::vector<std::uint16_t> depth;
  std::vector<std::uint8_t> rgb;

  static Frame make(FrameKind kind, int w, int h);
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Tiles of tileable value noise in [0, 1], cycled every `frames_per_tile` frames.
class FlipbookNoise {
 public:
  FlipbookNoise() = default;
  /// Bilinear value noise over a wrapping lattice with `lattice_step` px cells.
  static FlipbookNoise generate(const FlipbookLayout& layout, std::uint64_t seed,
                                int lattice_step = 8);
  /// Builds from explicit values (tile-major, row-major inside a tile).
  FlipbookNoise(const FlipbookLayout& layout, std::vector<double> values);

  const FlipbookLayout& layout() const { return layout_; }
  int tile_for_frame(int frame_index) const;
  /// Value of tile `tile` at (x mod tile_px, y mod tile_px); negative coordinates wrap.
  double sample(int tile, int x, int y) const;
  /// Noise the depth sensor sees at pixel (u, v) in frame `frame_index`.
  double at_frame(int frame_index, int u, int v) const {
    return sample(tile_for_frame(frame_index), u, v);
  }

 private:
  FlipbookLayout layout_;
  std::vector<double> values_;
};

/// Precomputed per-pixel ray directions for one camera.
class RayGrid {
 public:
  explicit RayGrid(const CameraSpec& cam);
  const CameraSpec& camera() const { return cam_; }
  const Vec3& dir(int u, int v) const { return dirs_[static_cast<std::size_t>(v) * cam_.resolution.width + u]; }

 private:
  CameraSpec cam_;
  std::vector<Vec3> dirs_;
};

/// Nearest positive hit per pixel; misses stay invalid with tag None.
DepthBuffer trace_depth(const Scene& scene, const CameraSpec& cam);
/// Traces primitives into an existing buffer, keeping the nearer hit.
void trace_into(DepthBuffer& buf, const RayGrid& rays, std::span<const Primitive> prims);

/// Linear depth-to-gray map: clamp(c * (d - d_min) / (d_max - d_min), 0, 1).
/// Invalid depths map to 0.
double depth_to_chromaticity(double depth, const SensorParams& sp);
/// 0 = no data; valid grays quantize to [1, 65535].
std::uint16_t encode_depth16(double depth, const SensorParams& sp);
/// Inverse of `encode_depth16` for unsaturated codes; 0 decodes to kInvalidDepth.
double decode_depth16(std::uint16_t code, const SensorParams& sp);

/// Distance- and edge-modulated dropout plus jitter driven by the flipbook.
DepthBuffer apply_depth_noise(const DepthBuffer& buf, const FlipbookNoise& noise,
                              const SensorParams& sp, int frame_index);

Frame encode_depth_frame(const DepthBuffer& buf, const SensorParams& sp);

/// Fresnel factor (1 - max(0, cos))^p.
double fresnel_factor(double facing_cos, double exponent);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
inline constexpr Rgb kInfraredCenter{230, 120, 30};
inline constexpr Rgb kInfraredEdge{40, 200, 90};
inline constexpr Rgb kInfraredEnvironment{15, 20, 70};

/// Infrared look: body pixels blend orange (center) to green (edge) by the
/// Fresnel factor, environment is dark blue, misses black. Pixels with
/// F > 0.6 are resampled at a panned-noise UV offset to blur the rims.
Frame shade_infrared(const DepthBuffer& buf, const FlipbookNoise& noise, const SensorParams& sp,
                     int frame_index);

/// Direction toward the fixed RGB key light.
Vec3 rgb_light_direction();
inline constexpr Rgb kSkinAlbedo{224, 172, 140};
inline constexpr Rgb kInteriorAlbedo{110, 110, 115};

/// Lambertian shading: albedo * (ambient + (1 - ambient) * max(0, n . l)).
Frame shade_rgb(const DepthBuffer& buf, const SensorParams& sp, double ambient);

/// Camera sensor params with the variant's sampled chromaticity and depth range.
SensorParams effective_sensor(const SensorParams& base, const VariantParams& variant);

/// Everything needed to render one recording.
struct RecordingSetup {
  const Timeline* timeline = nullptr;
  std::span<const GestureScript> scripts;
  const ArmRig* rig = nullptr;
  const CameraSpec* camera = nullptr;
  const VariantParams* variant = nullptr;
  const FlipbookNoise* noise = nullptr;
  SceneOptions scene;
};

/// Renders one frame of a recording, reusing `static_layer` (the traced
/// static scene) when provided.
Frame render_frame(const RecordingSetup& setup, int frame_index, const RayGrid& rays,
                   const DepthBuffer* static_layer, WarningCounters* warnings = nullptr);

/// Per frame: evaluate target, IK, pose, scene, trace, then the sensor model
/// of the camera kind. Frames are delivered in order to `sink`.
void render_sequence(const RecordingSetup& setup, const std::function<void(Frame&&)>& sink,
                     WarningCounters* warnings = nullptr);
std::vector<Frame> render_sequence(const RecordingSetup& setup,
                                   WarningCounters* warnings = nullptr);

}  // namespace gsynth
