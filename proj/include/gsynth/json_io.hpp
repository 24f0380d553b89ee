#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "gsynth/gesture.hpp"
#include "gsynth/ranges.hpp"
#include "gsynth/scene.hpp"
#include "gsynth/variation.hpp"

namespace gsynth {

using Json = nlohmann::json;

/// Reads fields from a JSON object and rejects keys that were never read.
/// Every error is a ConfigError prefixed with the dotted field path.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const { return obj_.contains(key); }
  const Json& raw(const std::string& key);
  std::string field(const std::string& key) const { return path_ + "." + key; }

  void read(const std::string& key, double& out);
  void read(const std::string& key, int& out);
  void read(const std::string& key, bool& out);
  void read(const std::string& key, std::string& out);
  void read(const std::string& key, std::uint64_t& out);
  void read(const std::string& key, Vec3& out);
  void read(const std::string& key, ParamRange& out);
  void read(const std::string& key, Resolution& out);

  /// Throws on any key not consumed by `read`/`raw`.
  void finish() const;

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void fail_field(const std::string& path, const std::string& what);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j, const std::string& path);
Json range_to_json(const ParamRange& r);
ParamRange range_from_json(const Json& j, const std::string& path);

Json to_json(const VariationConfig& cfg);
VariationConfig variation_from_json(const Json& j, const std::string& path = "variation");

Json to_json(const SensorParams& sp);
SensorParams sensor_from_json(const Json& j, const SensorParams& defaults, const std::string& path);

Json to_json(const CameraSpec& cam);
/// `defaults_res`/`defaults_fps` fill missing resolution/fps; "preset" picks
/// the initial pose, explicit position/rotation override it.
CameraSpec camera_from_json(const Json& j, Resolution defaults_res, double defaults_fps,
                            const std::string& path);

Json to_json(const GestureScript& g);
GestureScript gesture_from_json(const Json& j, const std::string& path);
/// Reads a gesture script file; IoError when unreadable, ConfigError when invalid.
GestureScript load_gesture_script(const std::string& path);

Json to_json(const VariantParams& v);
VariantParams variant_from_json(const Json& j, const std::string& path);

/// Fixed serialization: keys sorted, doubles in shortest round-trip form, two-space indent.
std::string canonical_dump(const Json& j);
/// Lower-case hex of a 64-bit value, zero padded to 16 digits.
std::string hex64(std::uint64_t v);

}  // namespace gsynth
