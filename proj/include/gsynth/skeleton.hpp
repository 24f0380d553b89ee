#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gsynth/common.hpp"

namespace gsynth {

inline constexpr int kFingerCount = 5;  // thumb, index, middle, ring, pinky
inline constexpr int kPhalanxCount = 3;

struct FingerChain {
  std::array<double, kPhalanxCount> lengths{4.0, 2.5, 2.0};  // cm, proximal first
  double radius = 0.8;                                       // cm
  /// Angle of the metacarpal ray from the palm axis, in the palm plane,
  /// positive toward the thumb side (deg).
  double fan_deg = 0.0;

  double total_length() const { return lengths[0] + lengths[1] + lengths[2]; }
  friend bool operator==(const FingerChain&, const FingerChain&) = default;
};

/// Kinematic arm + hand. All lengths in cm.
struct ArmRig {
  Vec3 shoulder_pos{18.0, 45.0, 0.0};
  double upper_len = 30.0;
  double fore_len = 28.0;
  double upper_radius = 4.5;
  double fore_radius = 3.5;
  double palm_len = 9.0;
  double palm_radius = 3.2;
  std::array<FingerChain, kFingerCount> fingers{{
      {{4.0, 2.5, 2.0}, 0.8, 20.0},
      {{4.0, 2.5, 2.0}, 0.8, 10.0},
      {{4.0, 2.5, 2.0}, 0.8, 2.0},
      {{4.0, 2.5, 2.0}, 0.8, -6.0},
      {{4.0, 2.5, 2.0}, 0.8, -14.0},
  }};
  /// Elbow-bend preference: down and outward.
  Vec3 elbow_pole = Vec3(0.6, -0.8, 0.0);
  bool is_left = false;

  /// Right-arm defaults; `left` mirrors them across the YZ plane.
  static ArmRig make_default(bool left = false);
  /// Same rig reflected across the YZ plane with the handedness flipped.
  ArmRig mirrored() const;
  /// Reach of the hand from the wrist with straight fingers.
  double hand_reach() const;
  /// Throws InvariantError on non-positive lengths or a non-unit pole.
  void validate() const;

  friend bool operator==(const ArmRig&, const ArmRig&) = default;
};

struct HandPose {
  std::array<double, kFingerCount> curl{};       // deg per phalanx joint, 0 = straight
  std::array<double, kFingerCount> abduction{};  // deg, positive toward the thumb side
  Vec3 wrist_rotation = Vec3::Zero();            // deg about (side, normal, forward)
  std::string preset_name = "open_palm";

  static constexpr double kMaxCurl = 110.0;
  static constexpr double kMaxAbduction = 25.0;

  /// Copy with curl in [0, 110] and abduction in [-25, 25].
  HandPose clamped() const;
  friend bool operator==(const HandPose&, const HandPose&) = default;
};

/// open_palm | two_finger | peace | point. Throws InvariantError otherwise.
HandPose hand_pose_preset(std::string_view name);
bool is_hand_pose_preset(std::string_view name);

struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 1.0;
  friend bool operator==(const Capsule&, const Capsule&) = default;
};

/// Joint layout: shoulder, elbow, wrist, palm center, then for each finger
/// (thumb..pinky) knuckle, two interphalangeal joints and the tip.
enum JointIndex : int {
  kShoulder = 0,
  kElbow = 1,
  kWrist = 2,
  kPalmCenter = 3,
  kFirstFingerJoint = 4,
};
inline constexpr int kJointsPerFinger = kPhalanxCount + 1;
inline constexpr int kJointCount = kFirstFingerJoint + kFingerCount * kJointsPerFinger;
inline constexpr int finger_joint(int finger, int j) {
  return kFirstFingerJoint + finger * kJointsPerFinger + j;
}

/// Orthonormal hand frame. `side` points toward the thumb, `normal` is the
/// direction the palm faces.
struct HandFrame {
  Vec3 forward = Vec3::UnitY();
  Vec3 side = -Vec3::UnitX();
  Vec3 normal = -Vec3::UnitZ();
};

/// Capsules are upper arm, forearm, palm, then the 15 phalanges in finger order.
struct PosedSkeleton {
  std::vector<Vec3> joints;
  std::vector<Capsule> capsules;
  HandFrame hand;
  friend bool operator==(const PosedSkeleton&, const PosedSkeleton&) = default;
};

struct IkSolution {
  Vec3 elbow;
  Vec3 wrist;
  bool clamped = false;
};

/// Minimum slack kept from full extension / full fold.
inline constexpr double kIkEpsilon = 1e-4;

/// Analytic two-bone solve. The target distance is clamped into
/// [|L1 - L2| + eps, L1 + L2 - eps]; the elbow lies in the plane spanned by
/// the shoulder->target axis and the pole vector, on the pole side.
/// Throws InvariantError if the target coincides with the shoulder.
IkSolution solve_two_bone_ik(const ArmRig& rig, const Vec3& wrist_target);

/// Hand frame for a right hand whose palm axis points along `aim`. The palm
/// faces the camera side (-Z) unless the aim is parallel to it.
HandFrame right_hand_frame(const Vec3& aim);
HandFrame hand_frame(const Vec3& aim, bool is_left);

/// Poses arm and hand: IK to `wrist_pos`, palm axis along `aim_dir`, then
/// wrist rotation, abduction and curl.
PosedSkeleton pose_hand(const ArmRig& rig, const Vec3& wrist_pos, const Vec3& aim_dir,
                        const HandPose& pose);

inline constexpr int kKeypointCount = 7;
/// Wrist, palm center, then thumb..pinky tips.
std::vector<Vec3> hand_keypoints(const PosedSkeleton& sk);

}  // namespace gsynth
