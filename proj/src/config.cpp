#include "gsynth/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gsynth/errors.hpp"

namespace gsynth {

ArmRig RigSettings::rig_for(bool left) const {
  ArmRig r = rig;
  r.is_left = false;
  return left ? r.mirrored() : r;
}

GesturePlacement RigSettings::placement_for(bool left) const {
  const ArmRig r = rig_for(left);
  const Vec3 rest = left ? mirror_x(rest_offset) : rest_offset;
  const Vec3 anchor = left ? mirror_x(anchor_offset) : anchor_offset;
  return {r.shoulder_pos + rest, r.shoulder_pos + anchor};
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.general == b.general && a.variation == b.variation && a.cameras == b.cameras &&
         a.rig == b.rig && a.scene.environment == b.scene.environment &&
         a.scene.character == b.scene.character && a.custom_gestures == b.custom_gestures;
}

GestureRegistry RunConfig::registry() const {
  GestureRegistry reg = GestureRegistry::with_builtins();
  for (const auto& g : custom_gestures) reg.add(g);
  return reg;
}

std::vector<const CameraSpec*> RunConfig::active_cameras() const {
  std::vector<const CameraSpec*> out;
  for (const auto& c : cameras) {
    if (c.active) out.push_back(&c);
  }
  return out;
}

const CameraSpec* RunConfig::find_camera(std::string_view id) const {
  for (const auto& c : cameras) {
    if (c.camera_id == id) return &c;
  }
  return nullptr;
}

void RunConfig::validate() const {
  const auto& g = general;
  if (g.recordings_per_gesture < 1) fail_field("recordings_per_gesture", "must be >= 1");
  if (g.resolution.width < 1 || g.resolution.height < 1) fail_field("resolution", "must be >= 1x1");
  if (!(g.fps >= 1.0)) fail_field("fps", "must be >= 1");
  if (g.gesture_names.empty()) fail_field("gestures", "must name at least one gesture");
  if (g.output_path.empty()) fail_field("output_path", "must not be empty");
  std::set<std::string> custom_names;
  for (const auto& s : custom_gestures) {
    s.validate();
    if (!custom_names.insert(s.name).second) {
      fail_field("custom_gestures", "duplicate gesture name '" + s.name + "'");
    }
  }
  const GestureRegistry reg = registry();
  std::set<std::string> names;
  for (const auto& n : g.gesture_names) {
    reg.at(n);
    if (!names.insert(n).second) fail_field("gestures", "duplicate gesture '" + n + "'");
  }
  variation.validate();
  try {
    rig.rig.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  if (cameras.empty()) fail_field("cameras", "must list at least one camera");
  std::set<std::string> ids;
  for (const auto& c : cameras) {
    c.validate();
    if (!ids.insert(c.camera_id).second) fail_field("cameras", "duplicate camera id '" + c.camera_id + "'");
  }
  if (active_cameras().empty()) fail_field("cameras", "no active camera");
}

namespace {

RigSettings rig_from_json(const Json& j) {
  RigSettings s;
  ObjectReader r(j, "rig");
  r.read("shoulder", s.rig.shoulder_pos);
  r.read("upper_len", s.rig.upper_len);
  r.read("fore_len", s.rig.fore_len);
  r.read("upper_radius", s.rig.upper_radius);
  r.read("fore_radius", s.rig.fore_radius);
  r.read("palm_len", s.rig.palm_len);
  r.read("palm_radius", s.rig.palm_radius);
  if (r.has("finger_lengths")) {
    const Json& fl = r.raw("finger_lengths");
    if (!fl.is_array() || fl.size() != kPhalanxCount) {
      fail_field(r.field("finger_lengths"), "expected three phalanx lengths");
    }
    for (auto& f : s.rig.fingers) {
      for (int k = 0; k < kPhalanxCount; ++k) {
        if (!fl[k].is_number()) fail_field(r.field("finger_lengths"), "expected numbers");
        f.lengths[k] = fl[k].get<double>();
      }
    }
  }
  if (r.has("finger_radius")) {
    double radius = 0.0;
    r.read("finger_radius", radius);
    for (auto& f : s.rig.fingers) f.radius = radius;
  }
  if (r.has("elbow_pole")) {
    Vec3 pole;
    r.read("elbow_pole", pole);
    if (pole.norm() < 1e-9) fail_field(r.field("elbow_pole"), "must be non-zero");
    s.rig.elbow_pole = pole.normalized();
  }
  r.read("rest_offset", s.rest_offset);
  r.read("anchor_offset", s.anchor_offset);
  r.finish();
  return s;
}

Json rig_to_json(const RigSettings& s) {
  const auto& f = s.rig.fingers.front();
  return {
      {"shoulder", vec_to_json(s.rig.shoulder_pos)},
      {"upper_len", s.rig.upper_len},
      {"fore_len", s.rig.fore_len},
      {"upper_radius", s.rig.upper_radius},
      {"fore_radius", s.rig.fore_radius},
      {"palm_len", s.rig.palm_len},
      {"palm_radius", s.rig.palm_radius},
      {"finger_lengths", f.lengths},
      {"finger_radius", f.radius},
      {"elbow_pole", vec_to_json(s.rig.elbow_pole)},
      {"rest_offset", vec_to_json(s.rest_offset)},
      {"anchor_offset", vec_to_json(s.anchor_offset)},
  };
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config: JSON syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  RunConfig cfg;
  ObjectReader r(doc, "config");
  auto& g = cfg.general;
  r.read("output_path", g.output_path);
  r.read("recordings_per_gesture", g.recordings_per_gesture);
  r.read("resolution", g.resolution);
  r.read("fps", g.fps);
  r.read("default_left_hand", g.default_left_hand);
  r.read("master_seed", g.master_seed);
  if (r.has("gestures")) {
    const Json& names = r.raw("gestures");
    if (!names.is_array()) fail_field("gestures", "expected a list of gesture names");
    for (const auto& n : names) {
      if (!n.is_string()) fail_field("gestures", "expected gesture names as strings");
      g.gesture_names.push_back(n.get<std::string>());
    }
  } else {
    for (const auto& b : builtin_gestures()) g.gesture_names.push_back(b.name);
  }
  std::string mode = "single";
  r.read("mode", mode);
  if (mode == "single") {
    g.mode = GenerationMode::Single;
  } else if (mode == "chain") {
    g.mode = GenerationMode::Chain;
  } else {
    fail_field("mode", "expected single or chain");
  }
  if (r.has("custom_gestures")) {
    const Json& list = r.raw("custom_gestures");
    if (!list.is_array()) fail_field("custom_gestures", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.custom_gestures.push_back(gesture_from_json(list[i], "custom_gestures[" + std::to_string(i) + "]"));
    }
  }
  if (r.has("variation")) cfg.variation = variation_from_json(r.raw("variation"), "variation");
  if (r.has("rig")) cfg.rig = rig_from_json(r.raw("rig"));
  if (r.has("scene")) {
    ObjectReader sr(r.raw("scene"), "scene");
    sr.read("environment", cfg.scene.environment);
    sr.read("character", cfg.scene.character);
    sr.finish();
  }
  if (r.has("cameras")) {
    const Json& list = r.raw("cameras");
    if (!list.is_array()) fail_field("cameras", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.cameras.push_back(camera_from_json(list[i], g.resolution, g.fps, "cameras[" + std::to_string(i) + "]"));
    }
  } else {
    cfg.cameras.push_back(camera_preset("infotainment", "depth0", CameraKind::Depth, g.resolution, g.fps));
  }
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Json config_to_json(const RunConfig& cfg) {
  const auto& g = cfg.general;
  Json cams = Json::array();
  for (const auto& c : cfg.cameras) cams.push_back(to_json(c));
  Json custom = Json::array();
  for (const auto& s : cfg.custom_gestures) custom.push_back(to_json(s));
  return {
      {"output_path", g.output_path},
      {"recordings_per_gesture", g.recordings_per_gesture},
      {"resolution", Json::array({g.resolution.width, g.resolution.height})},
      {"fps", g.fps},
      {"default_left_hand", g.default_left_hand},
      {"master_seed", g.master_seed},
      {"gestures", g.gesture_names},
      {"mode", g.mode == GenerationMode::Chain ? "chain" : "single"},
      {"custom_gestures", custom},
      {"variation", to_json(cfg.variation)},
      {"rig", rig_to_json(cfg.rig)},
      {"scene", {{"environment", cfg.scene.environment}, {"character", cfg.scene.character}}},
      {"cameras", cams},
  };
}

std::string serialize_config(const RunConfig& cfg) { return canonical_dump(config_to_json(cfg)); }

std::string config_digest(const RunConfig& cfg) {
  Json j = config_to_json(cfg);
  j.erase("output_path");
  return hex64(fnv1a64(canonical_dump(j)));
}

}  // namespace gsynth
