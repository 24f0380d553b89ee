#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsynth/common.hpp"
#include "gsynth/skeleton.hpp"
#include "gsynth/variation.hpp"

namespace gsynth {

enum class ArmPart { Arm, Hand, Finger };
std::string_view to_string(ArmPart p);
std::optional<ArmPart> parse_arm_part(std::string_view s);

/// Pose override at normalized gesture progress t in [0, 1].
struct PoseKeyframe {
  double t = 0.0;
  std::array<double, kFingerCount> curl{};
  std::array<double, kFingerCount> abduction{};
  friend bool operator==(const PoseKeyframe&, const PoseKeyframe&) = default;
};

/// One gesture class. Control points are in cm relative to the gesture anchor.
struct GestureScript {
  std::string name;
  std::vector<Vec3> control_points;
  bool closed = false;
  /// Number of loops around a closed path; ignored for open paths.
  double turns = 1.0;
  double static_hold_s = 0.0;
  double base_speed = 40.0;  // cm/s
  double pre_speed = 50.0;
  double post_speed = 50.0;
  std::string hand_pose = "open_palm";
  std::vector<PoseKeyframe> pose_track;
  ArmPart arm_part = ArmPart::Arm;
  bool use_left_hand = false;

  bool is_static() const { return static_hold_s > 0.0; }
  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const GestureScript&, const GestureScript&) = default;
};

/// The six built-in classes: swipe_right, swipe_up, swipe_right_two_finger,
/// peace_sign, rotate_two_finger, point_two_finger.
std::vector<GestureScript> builtin_gestures();

class GestureRegistry {
 public:
  static GestureRegistry with_builtins();

  /// Adds or replaces a script after validating it.
  void add(GestureScript script);
  const GestureScript* find(std::string_view name) const;
  /// Throws ConfigError for unknown names.
  const GestureScript& at(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, GestureScript, std::less<>> scripts_;
};

/// Uniform Catmull-Rom curve through every control point. Open curves
/// duplicate the end points for the boundary tangents; closed curves wrap.
/// The global parameter u in [0, 1] maps linearly onto the segments.
class CatmullRomSpline {
 public:
  CatmullRomSpline(std::vector<Vec3> points, bool closed);

  Vec3 evaluate(double u) const;
  Vec3 derivative(double u) const;
  int segment_count() const { return segments_; }
  double control_parameter(std::size_t i) const {
    return static_cast<double>(i) / segments_;
  }
  const std::vector<Vec3>& control_points() const { return points_; }
  bool closed() const { return closed_; }

 private:
  void locate(double u, int& seg, double& t) const;
  const Vec3& point(int i) const;

  std::vector<Vec3> points_;
  bool closed_;
  int segments_;
};

/// Throws InvariantError on fewer than 2 points or duplicate consecutive points.
CatmullRomSpline build_spline(std::span<const Vec3> points, bool closed);

/// Cumulative chord length over uniformly spaced parameter samples.
struct ArcTable {
  std::vector<double> u;
  std::vector<double> length;
  double total_length = 0.0;
};

inline constexpr int kDefaultArcSamples = 256;
ArcTable arc_length_table(const CatmullRomSpline& spline, int samples = kDefaultArcSamples);

/// Parameter value at arc length s (linear inverse lookup).
double parameter_at_arclength(const ArcTable& table, double s);

/// Position at arc length s. Values outside [0, total_length] are clamped
/// and counted in `warnings->arc_clamps`.
Vec3 position_at_arclength(const CatmullRomSpline& spline, const ArcTable& table, double s,
                           WarningCounters* warnings = nullptr);

/// A path traversed by one timeline phase: a point, a straight segment, or a
/// spline (possibly looped several times).
class PhasePath {
 public:
  static PhasePath point(const Vec3& p);
  static PhasePath line(const Vec3& a, const Vec3& b);
  static PhasePath spline(std::shared_ptr<const CatmullRomSpline> curve,
                          std::shared_ptr<const ArcTable> table, const Vec3& origin,
                          double turns = 1.0);

  double length() const { return length_; }
  Vec3 start() const { return position(0.0); }
  Vec3 end() const { return position(length_); }
  Vec3 position(double s, WarningCounters* warnings = nullptr) const;
  /// Unit tangent at s, or zero for degenerate paths.
  Vec3 tangent(double s) const;

 private:
  enum class Kind { Point, Line, Spline };
  Kind kind_ = Kind::Point;
  Vec3 a_ = Vec3::Zero();
  Vec3 b_ = Vec3::Zero();
  std::shared_ptr<const CatmullRomSpline> curve_;
  std::shared_ptr<const ArcTable> table_;
  double length_ = 0.0;
};

enum class PhaseKind { PreGesture, Gesture, Transition, Hold, PostGesture };
std::string_view to_string(PhaseKind k);

struct Phase {
  PhaseKind kind = PhaseKind::PreGesture;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  PhasePath path;
  double speed = 0.0;  // cm/s
  /// Index into the script list for Gesture/Hold phases and the script whose
  /// hand pose applies otherwise.
  int script_index = 0;

  int frame_count() const { return end_frame - start_frame; }
};

/// Inclusive frame interval of one labeled gesture.
struct LabelSpan {
  int first = 0;
  int last = -1;
  int script_index = 0;
  friend bool operator==(const LabelSpan&, const LabelSpan&) = default;
};

struct Timeline {
  std::vector<Phase> phases;
  int total_frames = 0;
  double fps = 30.0;
  std::vector<LabelSpan> gesture_spans;

  /// From the first labeled frame to the last one.
  LabelSpan label_span() const;
  const Phase& phase_at(int frame) const;
  /// Throws InvariantError unless phases tile [0, total_frames).
  void check_tiling() const;
};

/// Where the hand rests (on the wheel) and where gestures are anchored.
struct GesturePlacement {
  Vec3 rest_pos;
  Vec3 anchor;
  static GesturePlacement make_default(const ArmRig& rig);
};

inline constexpr double kMinGestureSpeed = 5.0;  // cm/s

/// Frames needed to cover `length` at `speed`: ceil(length / speed * fps).
int phase_frames(double length, double speed, double fps);

/// Pre-gesture, Gesture (or Hold for static scripts), Post-gesture.
Timeline plan_timeline(const GestureScript& script, const Vec3& rest_pos, const Vec3& anchor,
                       double fps, const VariantParams& variant);

/// One pre-gesture, every gesture with straight transitions between them at
/// the mean of the adjacent base speeds, then one post-gesture.
Timeline plan_chain(std::span<const GestureScript> scripts, const Vec3& rest_pos,
                    const Vec3& anchor, double fps, const VariantParams& variant);

struct FrameTarget {
  Vec3 wrist_target;
  Vec3 aim_dir;
  HandPose pose;
  PhaseKind phase = PhaseKind::PreGesture;
};

/// Default palm aim when the path gives no direction (holds, aiming modes).
Vec3 default_aim_direction();

/// Wrist target, aim and hand pose for one frame. `scripts` must be the list
/// the timeline was planned from. Throws InvariantError for out-of-range frames.
FrameTarget evaluate_frame(const Timeline& timeline, int frame,
                           std::span<const GestureScript> scripts, const ArmRig& rig,
                           const VariantParams& variant, WarningCounters* warnings = nullptr);

}  // namespace gsynth
