#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gsynth/config.hpp"
#include "gsynth/output.hpp"
#include "gsynth/render.hpp"

namespace gsynth {

/// Back-projected foreground centroid per labeled frame (cm, world frame).
struct Trajectory {
  std::vector<Vec3> points;
  /// Fraction of labeled frames with at least kMinForegroundPixels foreground pixels.
  double confidence = 0.0;
};

inline constexpr int kMinForegroundPixels = 50;
inline constexpr double kForegroundMargin = 5.0;  // cm in front of the background

/// Foreground = valid pixels nearer than (background - 5 cm), the background
/// being frame 0. Frames with too few pixels reuse the previous centroid.
/// Throws InvariantError when no labeled frame has enough foreground.
Trajectory extract_trajectory(std::span<const Frame> frames, const CameraSpec& cam,
                              const RecordingEntry& entry);

/// Full-window DTW with Euclidean point cost and match/insert/delete steps.
double dtw_distance(std::span<const Vec3> a, std::span<const Vec3> b);
inline double dtw_distance(const Trajectory& a, const Trajectory& b) {
  return dtw_distance(a.points, b.points);
}

struct LabeledTrajectory {
  Trajectory trajectory;
  std::string label;
  int variant_index = 0;
};

/// Label of the nearest member; ties go to the lowest (label, variant_index).
std::string classify_1nn(std::span<const LabeledTrajectory> dataset, const Trajectory& query);

/// Symmetric pairwise DTW matrix, computed over `jobs` threads.
std::vector<std::vector<double>> distance_matrix(std::span<const LabeledTrajectory> items, int jobs = 1);

struct SeparabilityReport {
  std::size_t samples = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  /// confusion[true][predicted] counts keyed by label.
  std::map<std::string, std::map<std::string, int>> confusion;
};

/// Leave-one-out 1-NN accuracy.
SeparabilityReport leave_one_out(std::span<const LabeledTrajectory> items, int jobs = 1);

/// Mean pairwise DTW distance; 0 for fewer than two trajectories.
double dispersion(std::span<const Trajectory> items);

/// Renders one recording in memory and extracts its trajectory (depth cameras only).
LabeledTrajectory trajectory_for(const RunConfig& cfg, const std::string& gesture, int variant_index,
                                 const std::string& camera_id, const ConditionMap& conditions = {});

/// Trajectories of every labeled depth recording listed in a manifest.
std::vector<LabeledTrajectory> load_trajectories(const DatasetManifest& m, const fs::path& root,
                                                 int jobs = 1);

struct AblationOptions {
  std::string gesture = "swipe_right";
  std::string camera_id;  // empty: first active depth camera
  int n_variants = 20;
  /// Collapse every other parameter range to its center so only P varies.
  bool isolate = true;
  int jobs = 1;
};

struct AblationResult {
  VariationParam param = VariationParam::SpeedOffset;
  /// Indexed by RangeCondition (Low, Median, High).
  std::array<double, 3> dispersion{};
};

/// For parameter P, renders n_variants recordings per condition (only P's
/// condition changes; variant seeds are shared across conditions) and
/// reports the mean pairwise DTW dispersion per condition.
AblationResult run_variance_ablation(const RunConfig& cfg, VariationParam param, const AblationOptions& opts);

Json to_json(const SeparabilityReport& r);
Json to_json(const AblationResult& r);

}  // namespace gsynth
