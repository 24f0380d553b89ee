#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gsynth/config.hpp"
#include "gsynth/output.hpp"
#include "gsynth/render.hpp"

namespace gsynth {

/// Version string written into manifests (not part of the config digest).
std::string_view tool_version();

/// One recording to produce: a gesture (or a chain of them) seen by one camera.
struct RecordingPlan {
  std::string label;  // chain labels are joined with '+'
  std::vector<GestureScript> scripts;
  int variant_index = 0;
  std::size_t camera_index = 0;
  std::uint64_t seed = 0;
  bool left_hand = false;
};

/// Cameras x gestures x variants, in that nesting order.
std::vector<RecordingPlan> plan_recordings(const RunConfig& cfg);

/// Everything derived from a plan before rendering.
struct PreparedRecording {
  VariantParams variant;
  ArmRig rig;
  Timeline timeline;
  FlipbookNoise noise;
};
PreparedRecording prepare_recording(const RunConfig& cfg, const RecordingPlan& plan);

/// Renders one recording frame by frame; returns its manifest entry (frame_dir
/// filled, frame files not written).
RecordingEntry render_recording(const RunConfig& cfg, const RecordingPlan& plan,
                                const std::function<void(Frame&&)>& sink);

/// Renders a single frame of gesture `gesture`, variant `variant_index`, on `camera_id`.
Frame render_preview(const RunConfig& cfg, const std::string& gesture, int frame_index,
                     const std::string& camera_id, int variant_index = 0);

struct GenerateOptions {
  int jobs = 1;
  bool force = false;
  /// Called from worker threads after each finished recording (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

struct GenerateSummary {
  std::size_t recordings = 0;
  std::size_t frames = 0;
  WarningCounters warnings;
  double wall_seconds = 0.0;
  std::string output_path;
  std::string manifest_path;
  std::string config_digest;
};

/// True when `out` already holds a manifest or any configured camera directory.
bool has_existing_output(const RunConfig& cfg, const fs::path& out);

/// Writes all frames and `<out>/manifest.json`. Existing output is refused
/// with IoError unless `force`, which clears it first. Output bytes do not
/// depend on `jobs`.
GenerateSummary generate_dataset(const RunConfig& cfg, const GenerateOptions& opts = {});

}  // namespace gsynth
