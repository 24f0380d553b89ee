#include "gsynth/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "gsynth/errors.hpp"

namespace gsynth {

std::string frame_extension(CameraKind kind) { return kind == CameraKind::Depth ? "pgm" : "ppm"; }

std::string frame_file_name(int index, CameraKind kind) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05d.", index);
  return buf + frame_extension(kind);
}

void write_frame(const Frame& frame, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  std::string header;
  std::string body;
  if (frame.kind == FrameKind::Depth16) {
    if (frame.depth.size() != n) throw InvariantError("depth frame size mismatch");
    header = "P5 " + std::to_string(frame.width) + " " + std::to_string(frame.height) + " 65535\n";
    body.resize(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      body[2 * i] = static_cast<char>(frame.depth[i] >> 8);
      body[2 * i + 1] = static_cast<char>(frame.depth[i] & 0xff);
    }
  } else {
    if (frame.rgb.size() != n * 3) throw InvariantError("color frame size mismatch");
    header = "P6 " + std::to_string(frame.width) + " " + std::to_string(frame.height) + " 255\n";
    body.assign(frame.rgb.begin(), frame.rgb.end());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << header;
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw IoError("truncated header in '" + path.string() + "'");
  return tok;
}

int header_int(std::istream& in, const fs::path& path) {
  const std::string t = header_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size() || v <= 0) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad header field '" + t + "' in '" + path.string() + "'");
  }
}

}  // namespace

Frame read_frame(const fs::path& path, FrameKind kind_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string magic = header_token(in, path);
  const int w = header_int(in, path);
  const int h = header_int(in, path);
  const int maxval = header_int(in, path);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  Frame f;
  if (magic == "P5") {
    if (maxval != 65535) throw IoError("expected 16-bit PGM in '" + path.string() + "'");
    f = Frame::make(FrameKind::Depth16, w, h);
    std::string body(n * 2, '\0');
    in.read(body.data(), static_cast<std::streamsize>(body.size()));
    if (in.gcount() != static_cast<std::streamsize>(body.size())) {
      throw IoError("truncated pixel data in '" + path.string() + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      f.depth[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(body[2 * i]) << 8) |
                                              static_cast<unsigned char>(body[2 * i + 1]));
    }
  } else if (magic == "P6") {
    if (maxval != 255) throw IoError("expected 8-bit PPM in '" + path.string() + "'");
    f = Frame::make(kind_hint == FrameKind::Ir8 ? FrameKind::Ir8 : FrameKind::Rgb8, w, h);
    in.read(reinterpret_cast<char*>(f.rgb.data()), static_cast<std::streamsize>(f.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.rgb.size())) {
      throw IoError("truncated pixel data in '" + path.string() + "'");
    }
  } else {
    throw IoError("unsupported image format '" + magic + "' in '" + path.string() + "'");
  }
  return f;
}

const CameraSpec* DatasetManifest::find_camera(const std::string& id) const {
  for (const auto& c : cameras) {
    if (c.camera_id == id) return &c;
  }
  return nullptr;
}

std::string recording_dir(const std::string& camera_id, const std::string& gesture, int variant_index) {
  return camera_id + "/" + gesture + "/" + std::to_string(variant_index);
}

Json to_json(const RecordingEntry& e) {
  Json segs = Json::array();
  for (const auto& s : e.segments) segs.push_back({{"label", s.label}, {"first", s.first}, {"last", s.last}});
  return {
      {"gesture_label", e.gesture_label},
      {"variant_index", e.variant_index},
      {"camera_id", e.camera_id},
      {"kind", std::string(to_string(e.kind))},
      {"frame_dir", e.frame_dir},
      {"frame_count", e.frame_count},
      {"fps", e.fps},
      {"resolution", Json::array({e.resolution.width, e.resolution.height})},
      {"label_span", Json::array({e.label_first, e.label_last})},
      {"segments", segs},
      {"variant_params", to_json(e.variant_params)},
      {"seed", e.seed},
      {"warnings", {{"ik_clamps", e.warnings.ik_clamps}, {"arc_clamps", e.warnings.arc_clamps}}},
  };
}

RecordingEntry entry_from_json(const Json& j, const std::string& path) {
  RecordingEntry e;
  ObjectReader r(j, path);
  r.read("gesture_label", e.gesture_label);
  r.read("variant_index", e.variant_index);
  r.read("camera_id", e.camera_id);
  std::string kind;
  r.read("kind", kind);
  const auto k = parse_camera_kind(kind);
  if (!k) fail_field(r.field("kind"), "unknown camera kind '" + kind + "'");
  e.kind = *k;
  r.read("frame_dir", e.frame_dir);
  r.read("frame_count", e.frame_count);
  r.read("fps", e.fps);
  r.read("resolution", e.resolution);
  const Json& span = r.raw("label_span");
  if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() || !span[1].is_number_integer()) {
    fail_field(r.field("label_span"), "expected [first, last]");
  }
  e.label_first = span[0].get<int>();
  e.label_last = span[1].get<int>();
  if (r.has("segments")) {
    const Json& segs = r.raw("segments");
    if (!segs.is_array()) fail_field(r.field("segments"), "expected a list");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      ObjectReader sr(segs[i], r.field("segments") + "[" + std::to_string(i) + "]");
      LabelSegment s;
      sr.read("label", s.label);
      sr.read("first", s.first);
      sr.read("last", s.last);
      sr.finish();
      e.segments.push_back(s);
    }
  }
  e.variant_params = variant_from_json(r.raw("variant_params"), r.field("variant_params"));
  r.read("seed", e.seed);
  if (r.has("warnings")) {
    ObjectReader wr(r.raw("warnings"), r.field("warnings"));
    wr.read("ik_clamps", e.warnings.ik_clamps);
    wr.read("arc_clamps", e.warnings.arc_clamps);
    wr.finish();
  }
  r.finish();
  if (e.frame_count < 0) fail_field(r.field("frame_count"), "must be >= 0");
  if (e.frame_count > 0 && (e.label_first < 0 || e.label_last >= e.frame_count || e.label_first > e.label_last)) {
    fail_field(r.field("label_span"), "outside [0, frame_count)");
  }
  return e;
}

Json to_json(const DatasetManifest& m) {
  Json cams = Json::array();
  for (const auto& c : m.cameras) cams.push_back(to_json(c));
  Json entries = Json::array();
  for (const auto& e : m.entries) entries.push_back(to_json(e));
  return {{"tool_version", m.tool_version},
          {"config_digest", m.config_digest},
          {"cameras", cams},
          {"entries", entries}};
}

DatasetManifest manifest_from_json(const Json& j) {
  DatasetManifest m;
  ObjectReader r(j, "manifest");
  r.read("tool_version", m.tool_version);
  r.read("config_digest", m.config_digest);
  if (r.has("cameras")) {
    const Json& cams = r.raw("cameras");
    if (!cams.is_array()) fail_field(r.field("cameras"), "expected a list");
    for (std::size_t i = 0; i < cams.size(); ++i) {
      m.cameras.push_back(camera_from_json(cams[i], Resolution{}, 30.0,
                                           "manifest.cameras[" + std::to_string(i) + "]"));
    }
  }
  const Json& entries = r.raw("entries");
  if (!entries.is_array()) fail_field(r.field("entries"), "expected a list");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    m.entries.push_back(entry_from_json(entries[i], "manifest.entries[" + std::to_string(i) + "]"));
  }
  r.finish();
  return m;
}

void check_manifest(const DatasetManifest& m) {
  std::set<std::tuple<std::string, int, std::string>> seen;
  for (const auto& e : m.entries) {
    if (!seen.emplace(e.gesture_label, e.variant_index, e.camera_id).second) {
      throw InvariantError("duplicate manifest entry (" + e.gesture_label + ", " +
                           std::to_string(e.variant_index) + ", " + e.camera_id + ")");
    }
  }
}

std::string manifest_to_string(const DatasetManifest& m) {
  check_manifest(m);
  return canonical_dump(to_json(m));
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  const std::string text = manifest_to_string(m);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    DatasetManifest m = manifest_from_json(Json::parse(ss.str()));
    check_manifest(m);
    return m;
  } catch (const Json::exception& e) {
    throw IoError("manifest '" + path.string() + "': " + e.what());
  } catch (const ConfigError& e) {
    throw IoError("manifest '" + path.string() + "': " + e.what());
  } catch (const InvariantError& e) {
    throw IoError("manifest '" + path.string() + "': " + e.what());
  }
}

int ratio_count(double ratio, int base_count) {
  if (!(ratio > 0.0)) throw ConfigError("ratio must be > 0");
  if (base_count < 0) throw ConfigError("base count must be >= 0");
  return static_cast<int>(std::floor(ratio * base_count / 100.0 + 1e-9));
}

std::vector<RecordingEntry> slice_by_ratio(const std::vector<RecordingEntry>& entries, double ratio,
                                           int base_count) {
  const int want = ratio_count(ratio, base_count);
  std::map<std::pair<std::string, std::string>, std::vector<const RecordingEntry*>> groups;
  for (const auto& e : entries) groups[{e.camera_id, e.gesture_label}].push_back(&e);
  std::vector<RecordingEntry> out;
  for (auto& [key, list] : groups) {
    if (static_cast<int>(list.size()) < want) {
      throw ConfigError("gesture '" + key.second + "' on camera '" + key.first + "' has " +
                        std::to_string(list.size()) + " variants, " + std::to_string(want) + " requested");
    }
    std::sort(list.begin(), list.end(),
              [](const RecordingEntry* a, const RecordingEntry* b) { return a->variant_index < b->variant_index; });
    for (int i = 0; i < want; ++i) out.push_back(*list[i]);
  }
  return out;
}

}  // namespace gsynth
