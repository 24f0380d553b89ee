#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gsynth/gesture.hpp"
#include "gsynth/json_io.hpp"
#include "gsynth/ranges.hpp"
#include "gsynth/scene.hpp"
#include "gsynth/skeleton.hpp"

namespace gsynth {

enum class GenerationMode { Single, Chain };

struct GeneralSettings {
  std::string output_path = "out";
  int recordings_per_gesture = 1;
  Resolution resolution{320, 240};
  double fps = 30.0;
  bool default_left_hand = false;
  std::uint64_t master_seed = 0;
  std::vector<std::string> gesture_names;
  GenerationMode mode = GenerationMode::Single;

  friend bool operator==(const GeneralSettings&, const GeneralSettings&) = default;
};

/// Anthropometrics plus the rest/anchor offsets from the shoulder.
struct RigSettings {
  ArmRig rig;
  Vec3 rest_offset{-10.0, -15.0, -25.0};
  Vec3 anchor_offset{0.0, 5.0, -45.0};

  /// Rig for the requested hand (left mirrors the right-hand settings).
  ArmRig rig_for(bool left) const;
  GesturePlacement placement_for(bool left) const;
  friend bool operator==(const RigSettings&, const RigSettings&) = default;
};

/// Everything a generation run needs.
struct RunConfig {
  GeneralSettings general;
  VariationConfig variation;
  std::vector<CameraSpec> cameras;
  RigSettings rig;
  SceneOptions scene;
  std::vector<GestureScript> custom_gestures;

  /// Built-ins plus custom gestures (custom ones replace built-ins of the same name).
  GestureRegistry registry() const;
  /// Re-checks every invariant; throws ConfigError naming the field.
  void validate() const;
  std::vector<const CameraSpec*> active_cameras() const;
  const CameraSpec* find_camera(std::string_view id) const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Parses, default-fills and validates a configuration document. Unknown keys
/// are rejected; syntax errors report the byte position.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

Json config_to_json(const RunConfig& cfg);
/// Canonical effective configuration (sorted keys, fixed number formatting).
std::string serialize_config(const RunConfig& cfg);
/// Hex FNV-1a-64 digest of the canonical config without `output_path`.
std::string config_digest(const RunConfig& cfg);

}  // namespace gsynth
