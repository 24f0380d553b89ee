#include "gsynth/skeleton.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "gsynth/errors.hpp"

namespace gsynth {

ArmRig ArmRig::make_default(bool left) {
  ArmRig rig;
  return left ? rig.mirrored() : rig;
}

ArmRig ArmRig::mirrored() const {
  ArmRig out = *this;
  out.shoulder_pos = mirror_x(shoulder_pos);
  out.elbow_pole = mirror_x(elbow_pole);
  out.is_left = !is_left;
  return out;
}

double ArmRig::hand_reach() const {
  double reach = 0.0;
  for (const auto& f : fingers) reach = std::max(reach, f.total_length());
  return palm_len + reach;
}

void ArmRig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvariantError(std::string("rig.") + name + " must be positive");
    }
  };
  positive(upper_len, "upper_len");
  positive(fore_len, "fore_len");
  positive(upper_radius, "upper_radius");
  positive(fore_radius, "fore_radius");
  positive(palm_len, "palm_len");
  positive(palm_radius, "palm_radius");
  for (const auto& f : fingers) {
    for (double l : f.lengths) positive(l, "finger_lengths");
    positive(f.radius, "finger_radius");
  }
  if (std::abs(elbow_pole.norm() - 1.0) > 1e-9) {
    throw InvariantError("rig.elbow_pole must have unit norm");
  }
}

HandPose HandPose::clamped() const {
  HandPose out = *this;
  for (auto& c : out.curl) c = std::clamp(c, 0.0, kMaxCurl);
  for (auto& a : out.abduction) a = std::clamp(a, -kMaxAbduction, kMaxAbduction);
  return out;
}

namespace {

struct PresetDef {
  std::string_view name;
  std::array<double, kFingerCount> curl;
  std::array<double, kFingerCount> abduction;
};

constexpr std::array<PresetDef, 4> kPresets = {{
    {"open_palm", {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}},
    {"two_finger", {15, 0, 0, 95, 95}, {0, -3, 3, 0, 0}},
    {"peace", {70, 0, 0, 100, 100}, {0, 8, -8, 0, 0}},
    {"point", {75, 0, 0, 100, 100}, {0, -4, 4, 0, 0}},
}};

}  // namespace

bool is_hand_pose_preset(std::string_view name) {
  return std::any_of(kPresets.begin(), kPresets.end(),
                     [&](const PresetDef& p) { return p.name == name; });
}

HandPose hand_pose_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) {
      HandPose pose;
      pose.curl = p.curl;
      pose.abduction = p.abduction;
      pose.preset_name = std::string(p.name);
      return pose;
    }
  }
  throw InvariantError("unknown hand pose preset '" + std::string(name) + "'");
}

namespace {

IkSolution solve_right(const ArmRig& rig, const Vec3& target) {
  const Vec3 to_target = target - rig.shoulder_pos;
  const double raw = to_target.norm();
  if (raw < 1e-9) throw InvariantError("target coincides with shoulder");

  const double l1 = rig.upper_len;
  const double l2 = rig.fore_len;
  const double lo = std::abs(l1 - l2) + kIkEpsilon;
  const double hi = l1 + l2 - kIkEpsilon;
  const double d = std::clamp(raw, lo, hi);
  const Vec3 axis = to_target / raw;

  IkSolution out;
  out.clamped = d != raw;
  out.wrist = out.clamped ? Vec3(rig.shoulder_pos + axis * d) : target;

  // Bend direction: pole projected off the reach axis.
  Vec3 bend = rig.elbow_pole - rig.elbow_pole.dot(axis) * axis;
  if (bend.norm() < 1e-9) {
    const Vec3 alt = std::abs(axis.y()) < 0.9 ? Vec3(0.0, -1.0, 0.0) : Vec3(1.0, 0.0, 0.0);
    bend = alt - alt.dot(axis) * axis;
  }
  bend.normalize();

  const double cos_s = std::clamp((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
  const double sin_s = std::sqrt(std::max(0.0, 1.0 - cos_s * cos_s));
  out.elbow = rig.shoulder_pos + l1 * (cos_s * axis + sin_s * bend);
  return out;
}

Mat3 euler_xyz(const Vec3& deg) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(deg_to_rad(deg.z()), Vec3::UnitZ()) *
          AngleAxisd(deg_to_rad(deg.y()), Vec3::UnitY()) *
          AngleAxisd(deg_to_rad(deg.x()), Vec3::UnitX()))
      .toRotationMatrix();
}

PosedSkeleton pose_right(const ArmRig& rig, const Vec3& wrist_pos, const Vec3& aim,
                         const HandPose& raw_pose) {
  const HandPose pose = raw_pose.clamped();
  const IkSolution ik = solve_right(rig, wrist_pos);

  HandFrame frame = right_hand_frame(aim);
  Mat3 basis;
  basis.col(0) = frame.side;
  basis.col(1) = frame.normal;
  basis.col(2) = frame.forward;
  basis = basis * euler_xyz(pose.wrist_rotation);
  frame.side = basis.col(0);
  frame.normal = basis.col(1);
  frame.forward = basis.col(2);

  PosedSkeleton sk;
  sk.hand = frame;
  sk.joints.resize(kJointCount);
  sk.joints[kShoulder] = rig.shoulder_pos;
  sk.joints[kElbow] = ik.elbow;
  sk.joints[kWrist] = ik.wrist;
  sk.joints[kPalmCenter] = ik.wrist + frame.forward * (0.5 * rig.palm_len);

  sk.capsules.reserve(3 + kFingerCount * kPhalanxCount);
  sk.capsules.push_back({rig.shoulder_pos, ik.elbow, rig.upper_radius});
  sk.capsules.push_back({ik.elbow, ik.wrist, rig.fore_radius});
  sk.capsules.push_back({ik.wrist, ik.wrist + frame.forward * rig.palm_len, rig.palm_radius});

  for (int f = 0; f < kFingerCount; ++f) {
    const FingerChain& chain = rig.fingers[f];
    const double fan = deg_to_rad(chain.fan_deg);
    const Vec3 ray = std::cos(fan) * frame.forward + std::sin(fan) * frame.side;
    Vec3 joint = ik.wrist + rig.palm_len * ray;
    sk.joints[finger_joint(f, 0)] = joint;

    const double spread = deg_to_rad(chain.fan_deg + pose.abduction[f]);
    const Vec3 base = std::cos(spread) * frame.forward + std::sin(spread) * frame.side;
    const double curl = deg_to_rad(pose.curl[f]);
    for (int k = 0; k < kPhalanxCount; ++k) {
      const double angle = curl * (k + 1);
      const Vec3 dir = std::cos(angle) * base + std::sin(angle) * frame.normal;
      const Vec3 next = joint + chain.lengths[k] * dir;
      sk.capsules.push_back({joint, next, chain.radius});
      joint = next;
      sk.joints[finger_joint(f, k + 1)] = joint;
    }
  }
  return sk;
}

IkSolution mirror(const IkSolution& s) {
  return {mirror_x(s.elbow), mirror_x(s.wrist), s.clamped};
}

HandFrame mirror(const HandFrame& f) {
  return {mirror_x(f.forward), mirror_x(f.side), mirror_x(f.normal)};
}

PosedSkeleton mirror(PosedSkeleton sk) {
  for (auto& j : sk.joints) j = mirror_x(j);
  for (auto& c : sk.capsules) {
    c.a = mirror_x(c.a);
    c.b = mirror_x(c.b);
  }
  sk.hand = mirror(sk.hand);
  return sk;
}

}  // namespace

IkSolution solve_two_bone_ik(const ArmRig& rig, const Vec3& wrist_target) {
  if (!rig.is_left) return solve_right(rig, wrist_target);
  return mirror(solve_right(rig.mirrored(), mirror_x(wrist_target)));
}

HandFrame right_hand_frame(const Vec3& aim) {
  HandFrame frame;
  frame.forward = aim.normalized();
  Vec3 ref(0.0, 0.0, -1.0);
  Vec3 normal = ref - ref.dot(frame.forward) * frame.forward;
  if (normal.norm() < 1e-6) {
    ref = Vec3(0.0, -1.0, 0.0);
    normal = ref - ref.dot(frame.forward) * frame.forward;
  }
  frame.normal = normal.normalized();
  frame.side = frame.forward.cross(frame.normal);
  return frame;
}

HandFrame hand_frame(const Vec3& aim, bool is_left) {
  if (!is_left) return right_hand_frame(aim);
  return mirror(right_hand_frame(mirror_x(aim)));
}

PosedSkeleton pose_hand(const ArmRig& rig, const Vec3& wrist_pos, const Vec3& aim_dir,
                        const HandPose& pose) {
  if (!rig.is_left) return pose_right(rig, wrist_pos, aim_dir, pose);
  return mirror(pose_right(rig.mirrored(), mirror_x(wrist_pos), mirror_x(aim_dir), pose));
}

std::vector<Vec3> hand_keypoints(const PosedSkeleton& sk) {
  std::vector<Vec3> out;
  out.reserve(kKeypointCount);
  out.push_back(sk.joints[kWrist]);
  out.push_back(sk.joints[kPalmCenter]);
  for (int f = 0; f < kFingerCount; ++f) out.push_back(sk.joints[finger_joint(f, kPhalanxCount)]);
  return out;
}

}  // namespace gsynth
