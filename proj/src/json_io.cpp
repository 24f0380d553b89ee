#include "gsynth/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gsynth/errors.hpp"

namespace gsynth {

void fail_field(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

ObjectReader::ObjectReader(const Json& j, std::string path) : obj_(j), path_(std::move(path)) {
  if (!j.is_object()) fail_field(path_, "expected an object");
}

const Json& ObjectReader::raw(const std::string& key) {
  seen_.insert(key);
  return obj_.at(key);
}

void ObjectReader::read(const std::string& key, double& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_number()) fail_field(field(key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) fail_field(field(key), "expected a finite number");
}

void ObjectReader::read(const std::string& key, int& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_number_integer()) fail_field(field(key), "expected an integer");
  out = v.get<int>();
}

void ObjectReader::read(const std::string& key, bool& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_boolean()) fail_field(field(key), "expected true or false");
  out = v.get<bool>();
}

void ObjectReader::read(const std::string& key, std::string& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_string()) fail_field(field(key), "expected a string");
  out = v.get<std::string>();
}

void ObjectReader::read(const std::string& key, std::uint64_t& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail_field(field(key), "expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void ObjectReader::read(const std::string& key, Vec3& out) {
  if (!has(key)) return;
  out = vec_from_json(raw(key), field(key));
}

void ObjectReader::read(const std::string& key, ParamRange& out) {
  if (!has(key)) return;
  out = range_from_json(raw(key), field(key));
}

void ObjectReader::read(const std::string& key, Resolution& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    fail_field(field(key), "expected [width, height]");
  }
  out = {v[0].get<int>(), v[1].get<int>()};
}

void ObjectReader::finish() const {
  for (const auto& [k, v] : obj_.items()) {
    if (!seen_.count(k)) fail_field(path_, "unknown key '" + k + "'");
  }
}

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail_field(path, "expected [x, y, z]");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) fail_field(path, "expected numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

Json range_to_json(const ParamRange& r) { return Json::array({r.lo, r.hi}); }

ParamRange range_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail_field(path, "expected [lo, hi]");
  }
  ParamRange r{j[0].get<double>(), j[1].get<double>()};
  if (r.lo > r.hi) fail_field(path, "lo must not exceed hi");
  return r;
}

// ---------------------------------------------------------------------------

Json to_json(const VariationConfig& cfg) {
  Json j;
  j["speed_offset"] = range_to_json(cfg.speed_offset);
  j["position_offset"] = {{"x", range_to_json(cfg.position_offset[0])},
                          {"y", range_to_json(cfg.position_offset[1])},
                          {"z", range_to_json(cfg.position_offset[2])}};
  j["finger_spacing"] = range_to_json(cfg.finger_spacing);
  j["finger_rotation"] = range_to_json(cfg.finger_rotation);
  j["hand_orientation"] = range_to_json(cfg.hand_orientation);
  j["chromaticity_coeff"] = range_to_json(cfg.chromaticity_coeff);
  j["depth_min"] = range_to_json(cfg.depth_min);
  j["depth_max"] = range_to_json(cfg.depth_max);
  Json conds = Json::object();
  for (const auto& [p, c] : cfg.condition_overrides) {
    conds[std::string(to_string(p))] = std::string(to_string(c));
  }
  j["conditions"] = conds;
  return j;
}

VariationConfig variation_from_json(const Json& j, const std::string& path) {
  VariationConfig cfg;
  ObjectReader r(j, path);
  r.read("speed_offset", cfg.speed_offset);
  if (r.has("position_offset")) {
    const Json& p = r.raw("position_offset");
    if (p.is_array()) {
      const ParamRange all = range_from_json(p, r.field("position_offset"));
      cfg.position_offset = {all, all, all};
    } else {
      ObjectReader pr(p, r.field("position_offset"));
      pr.read("x", cfg.position_offset[0]);
      pr.read("y", cfg.position_offset[1]);
      pr.read("z", cfg.position_offset[2]);
      pr.finish();
    }
  }
  r.read("finger_spacing", cfg.finger_spacing);
  r.read("finger_rotation", cfg.finger_rotation);
  r.read("hand_orientation", cfg.hand_orientation);
  r.read("chromaticity_coeff", cfg.chromaticity_coeff);
  r.read("depth_min", cfg.depth_min);
  r.read("depth_max", cfg.depth_max);
  if (r.has("conditions")) {
    const Json& c = r.raw("conditions");
    if (!c.is_object()) fail_field(r.field("conditions"), "expected an object");
    for (const auto& [k, v] : c.items()) {
      const auto param = parse_variation_param(k);
      if (!param) fail_field(r.field("conditions"), "unknown variation parameter '" + k + "'");
      const auto cond = v.is_string() ? parse_range_condition(v.get<std::string>()) : std::nullopt;
      if (!cond) fail_field(r.field("conditions") + "." + k, "expected low, median or high");
      cfg.condition_overrides[*param] = *cond;
    }
  }
  r.finish();
  return cfg;
}

Json to_json(const SensorParams& sp) {
  return {
      {"chromaticity_coeff", sp.chromaticity_coeff},
      {"depth_min", sp.depth_min},
      {"depth_max", sp.depth_max},
      {"noise_dist_weight", sp.noise_dist_weight},
      {"noise_edge_weight", sp.noise_edge_weight},
      {"edge_scale", sp.edge_scale},
      {"dropout_threshold", sp.dropout_threshold},
      {"depth_jitter", sp.depth_jitter},
      {"flipbook",
       {{"tile_px", sp.flipbook.tile_px},
        {"tile_count", sp.flipbook.tile_count},
        {"frames_per_tile", sp.flipbook.frames_per_tile}}},
      {"fresnel_exponent", sp.fresnel_exponent},
      {"blur_radius", sp.blur_radius},
      {"ambient", sp.ambient},
  };
}

SensorParams sensor_from_json(const Json& j, const SensorParams& defaults, const std::string& path) {
  SensorParams sp = defaults;
  ObjectReader r(j, path);
  r.read("chromaticity_coeff", sp.chromaticity_coeff);
  r.read("depth_min", sp.depth_min);
  r.read("depth_max", sp.depth_max);
  r.read("noise_dist_weight", sp.noise_dist_weight);
  r.read("noise_edge_weight", sp.noise_edge_weight);
  r.read("edge_scale", sp.edge_scale);
  r.read("dropout_threshold", sp.dropout_threshold);
  r.read("depth_jitter", sp.depth_jitter);
  if (r.has("flipbook")) {
    ObjectReader fr(r.raw("flipbook"), r.field("flipbook"));
    fr.read("tile_px", sp.flipbook.tile_px);
    fr.read("tile_count", sp.flipbook.tile_count);
    fr.read("frames_per_tile", sp.flipbook.frames_per_tile);
    fr.finish();
  }
  r.read("fresnel_exponent", sp.fresnel_exponent);
  r.read("blur_radius", sp.blur_radius);
  r.read("ambient", sp.ambient);
  r.finish();
  return sp;
}

Json to_json(const CameraSpec& cam) {
  return {
      {"id", cam.camera_id},
      {"kind", std::string(to_string(cam.kind))},
      {"active", cam.active},
      {"position", vec_to_json(cam.position)},
      {"rotation", vec_to_json(cam.rotation_deg)},
      {"fov_deg", cam.fov_deg},
      {"resolution", Json::array({cam.resolution.width, cam.resolution.height})},
      {"fps", cam.fps},
      {"sensor", to_json(cam.sensor)},
  };
}

CameraSpec camera_from_json(const Json& j, Resolution defaults_res, double defaults_fps,
                            const std::string& path) {
  ObjectReader r(j, path);
  std::string id = "depth0";
  r.read("id", id);
  std::string kind_name = "depth";
  r.read("kind", kind_name);
  const auto kind = parse_camera_kind(kind_name);
  if (!kind) fail_field(r.field("kind"), "expected rgb, depth or infrared");
  Resolution res = defaults_res;
  r.read("resolution", res);
  double fps = defaults_fps;
  r.read("fps", fps);

  std::string preset = "infotainment";
  r.read("preset", preset);
  CameraSpec cam = camera_preset(preset, id, *kind, res, fps);
  r.read("active", cam.active);
  r.read("position", cam.position);
  r.read("rotation", cam.rotation_deg);
  if (r.has("look_at")) {
    cam.rotation_deg = look_at_rotation(cam.position, vec_from_json(r.raw("look_at"), r.field("look_at")));
  }
  r.read("fov_deg", cam.fov_deg);
  if (r.has("sensor")) cam.sensor = sensor_from_json(r.raw("sensor"), cam.sensor, r.field("sensor"));
  r.finish();
  return cam;
}

Json to_json(const GestureScript& g) {
  Json pts = Json::array();
  for (const auto& p : g.control_points) pts.push_back(vec_to_json(p));
  Json track = Json::array();
  for (const auto& k : g.pose_track) {
    track.push_back({{"t", k.t}, {"curl", k.curl}, {"abduction", k.abduction}});
  }
  return {
      {"name", g.name},
      {"control_points", pts},
      {"closed", g.closed},
      {"turns", g.turns},
      {"static_hold_s", g.static_hold_s},
      {"base_speed", g.base_speed},
      {"pre_speed", g.pre_speed},
      {"post_speed", g.post_speed},
      {"hand_pose", g.hand_pose},
      {"pose_track", track},
      {"arm_part", std::string(to_string(g.arm_part))},
      {"use_left_hand", g.use_left_hand},
  };
}

namespace {

std::array<double, kFingerCount> finger_array(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != kFingerCount) fail_field(path, "expected five numbers");
  std::array<double, kFingerCount> out{};
  for (int i = 0; i < kFingerCount; ++i) {
    if (!j[i].is_number()) fail_field(path, "expected five numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace

GestureScript gesture_from_json(const Json& j, const std::string& path) {
  GestureScript g;
  ObjectReader r(j, path);
  r.read("name", g.name);
  if (r.has("control_points")) {
    const Json& pts = r.raw("control_points");
    if (!pts.is_array()) fail_field(r.field("control_points"), "expected a list of [x, y, z]");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      g.control_points.push_back(vec_from_json(pts[i], r.field("control_points") + "[" + std::to_string(i) + "]"));
    }
  }
  r.read("closed", g.closed);
  r.read("turns", g.turns);
  r.read("static_hold_s", g.static_hold_s);
  r.read("base_speed", g.base_speed);
  r.read("pre_speed", g.pre_speed);
  r.read("post_speed", g.post_speed);
  r.read("hand_pose", g.hand_pose);
  if (r.has("pose_track")) {
    const Json& track = r.raw("pose_track");
    if (!track.is_array()) fail_field(r.field("pose_track"), "expected a list");
    for (std::size_t i = 0; i < track.size(); ++i) {
      const std::string kp = r.field("pose_track") + "[" + std::to_string(i) + "]";
      ObjectReader kr(track[i], kp);
      PoseKeyframe key;
      kr.read("t", key.t);
      if (kr.has("curl")) key.curl = finger_array(kr.raw("curl"), kr.field("curl"));
      if (kr.has("abduction")) key.abduction = finger_array(kr.raw("abduction"), kr.field("abduction"));
      kr.finish();
      g.pose_track.push_back(key);
    }
  }
  std::string part = "arm";
  r.read("arm_part", part);
  const auto ap = parse_arm_part(part);
  if (!ap) fail_field(r.field("arm_part"), "expected arm, hand or finger");
  g.arm_part = *ap;
  r.read("use_left_hand", g.use_left_hand);
  r.finish();
  g.validate();
  return g;
}

GestureScript load_gesture_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gesture script '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": JSON syntax error: " + e.what());
  }
  return gesture_from_json(j, path);
}

Json to_json(const VariantParams& v) {
  return {
      {"variant_index", v.variant_index},
      {"seed", v.seed},
      {"speed_offset", v.speed_offset},
      {"position_offset", vec_to_json(v.position_offset)},
      {"finger_spacing_offsets", v.finger_spacing_offsets},
      {"finger_rotation_offsets", v.finger_rotation_offsets},
      {"hand_orientation_offset", vec_to_json(v.hand_orientation_offset)},
      {"chromaticity_coeff", v.chromaticity_coeff},
      {"depth_min", v.depth_min},
      {"depth_max", v.depth_max},
  };
}

VariantParams variant_from_json(const Json& j, const std::string& path) {
  VariantParams v;
  ObjectReader r(j, path);
  r.read("variant_index", v.variant_index);
  r.read("seed", v.seed);
  r.read("speed_offset", v.speed_offset);
  r.read("position_offset", v.position_offset);
  if (r.has("finger_spacing_offsets")) {
    v.finger_spacing_offsets = finger_array(r.raw("finger_spacing_offsets"), r.field("finger_spacing_offsets"));
  }
  if (r.has("finger_rotation_offsets")) {
    v.finger_rotation_offsets = finger_array(r.raw("finger_rotation_offsets"), r.field("finger_rotation_offsets"));
  }
  r.read("hand_orientation_offset", v.hand_orientation_offset);
  r.read("chromaticity_coeff", v.chromaticity_coeff);
  r.read("depth_min", v.depth_min);
  r.read("depth_max", v.depth_max);
  r.finish();
  return v;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gsynth
