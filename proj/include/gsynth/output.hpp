#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsynth/json_io.hpp"
#include "gsynth/render.hpp"
#include "gsynth/scene.hpp"
#include "gsynth/variation.hpp"

namespace gsynth {

namespace fs = std::filesystem;

/// Depth16 -> 16-bit binary PGM, Rgb8/Ir8 -> binary PPM.
void write_frame(const Frame& frame, const fs::path& path);
/// Reads a binary PGM (maxval 65535) or PPM (maxval 255). IR frames read back
/// as Rgb8 unless `kind_hint` says otherwise.
Frame read_frame(const fs::path& path, FrameKind kind_hint = FrameKind::Rgb8);
std::string frame_extension(CameraKind kind);
std::string frame_file_name(int index, CameraKind kind);

/// One labeled gesture inside a recording (several in chain mode).
struct LabelSegment {
  std::string label;
  int first = 0;
  int last = -1;
  friend bool operator==(const LabelSegment&, const LabelSegment&) = default;
};

struct RecordingEntry {
  std::string gesture_label;
  int variant_index = 0;
  std::string camera_id;
  CameraKind kind = CameraKind::Depth;
  std::string frame_dir;  // relative to the manifest directory
  int frame_count = 0;
  double fps = 30.0;
  Resolution resolution;
  int label_first = 0;
  int label_last = -1;
  std::vector<LabelSegment> segments;
  VariantParams variant_params;
  std::uint64_t seed = 0;
  WarningCounters warnings;

  friend bool operator==(const RecordingEntry&, const RecordingEntry&) = default;
};

struct DatasetManifest {
  std::string tool_version;
  std::string config_digest;
  std::vector<CameraSpec> cameras;
  std::vector<RecordingEntry> entries;

  const CameraSpec* find_camera(const std::string& id) const;
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// `<camera_id>/<gesture>/<variant_index>`
std::string recording_dir(const std::string& camera_id, const std::string& gesture, int variant_index);

Json to_json(const RecordingEntry& e);
RecordingEntry entry_from_json(const Json& j, const std::string& path);
Json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const Json& j);

/// Throws InvariantError on a duplicate (label, variant, camera) triple.
void check_manifest(const DatasetManifest& m);
std::string manifest_to_string(const DatasetManifest& m);
void write_manifest(const DatasetManifest& m, const fs::path& path);
/// IoError for unreadable files and schema violations.
DatasetManifest read_manifest(const fs::path& path);

/// Per (camera, gesture) group, the first floor(ratio * base / 100) entries by
/// variant index. Throws ConfigError when a group has fewer variants.
std::vector<RecordingEntry> slice_by_ratio(const std::vector<RecordingEntry>& entries, double ratio,
                                           int base_count);
int ratio_count(double ratio, int base_count);

}  // namespace gsynth
