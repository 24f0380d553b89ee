#include <doctest.h>

#include <random>

#include "gsynth/errors.hpp"
#include "gsynth/skeleton.hpp"
#include "oracles.hpp"

using namespace gsynth;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

}  // namespace

TEST_SUITE("skeleton") {

TEST_CASE("full extension along +X clamps by epsilon") {
  ArmRig rig;
  rig.shoulder_pos = Vec3::Zero();
  const IkSolution s = solve_two_bone_ik(rig, Vec3(58, 0, 0));
  CHECK(s.clamped);
  CHECK(s.wrist.x() == doctest::Approx(58.0 - kIkEpsilon).epsilon(1e-12));
  CHECK((s.elbow - Vec3(30, 0, 0)).norm() < 0.1);
  CHECK((s.elbow - s.wrist).norm() == doctest::Approx(28.0).epsilon(1e-12));
  // Elbow is collinear up to the epsilon slack.
  const double off_axis = Vec3(0, s.elbow.y(), s.elbow.z()).norm();
  CHECK(off_axis < 0.1);
}

TEST_CASE("unit bones at distance sqrt(2) bend 90 degrees") {
  ArmRig rig;
  rig.shoulder_pos = Vec3::Zero();
  rig.upper_len = 1.0;
  rig.fore_len = 1.0;
  const Vec3 target = Vec3(1.0, 1.0, 0.0);
  const IkSolution s = solve_two_bone_ik(rig, target);
  CHECK_FALSE(s.clamped);
  const Vec3 u = rig.shoulder_pos - s.elbow;
  const Vec3 f = s.wrist - s.elbow;
  CHECK(u.dot(f) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("target at the shoulder is an error") {
  ArmRig rig;
  CHECK_THROWS_AS(solve_two_bone_ik(rig, rig.shoulder_pos), InvariantError);
}

TEST_CASE("random reachable targets: exact reach, bone lengths, CCD agreement") {
  ArmRig rig;
  std::mt19937_64 rng(1234);
  const double lo = std::abs(rig.upper_len - rig.fore_len) + 2 * kIkEpsilon;
  const double hi = rig.upper_len + rig.fore_len - 2 * kIkEpsilon;
  std::uniform_real_distribution<double> dist(lo, hi);
  double worst_ccd = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 target = rig.shoulder_pos + dist(rng) * random_unit(rng);
    const IkSolution s = solve_two_bone_ik(rig, target);
    REQUIRE((s.wrist - target).norm() < 1e-6);
    REQUIRE(std::abs((s.elbow - rig.shoulder_pos).norm() - rig.upper_len) < 1e-6);
    REQUIRE(std::abs((s.wrist - s.elbow).norm() - rig.fore_len) < 1e-6);
    const Vec3 axis = (target - rig.shoulder_pos).normalized();
    if ((rig.elbow_pole - rig.elbow_pole.dot(axis) * axis).norm() < 1e-3) continue;
    const Vec3 e = oracle::ccd_elbow(rig.shoulder_pos, rig.upper_len, rig.fore_len, rig.elbow_pole, target);
    worst_ccd = std::max(worst_ccd, (e - s.elbow).norm());
  }
  CHECK(worst_ccd < 1e-4);
}

TEST_CASE("elbow moves continuously along a straight target path") {
  ArmRig rig;
  const Vec3 a = rig.shoulder_pos + Vec3(-20, -20, -30);
  const Vec3 b = rig.shoulder_pos + Vec3(25, 10, -35);
  Vec3 prev = solve_two_bone_ik(rig, a).elbow;
  const int steps = static_cast<int>((b - a).norm() / 0.5) + 1;
  for (int i = 1; i <= steps; ++i) {
    const Vec3 t = a + (b - a) * (static_cast<double>(i) / steps);
    const Vec3 e = solve_two_bone_ik(rig, t).elbow;
    CHECK((e - prev).norm() <= 5.0);
    prev = e;
  }
}

TEST_CASE("left rig mirrors the right rig") {
  const ArmRig right = ArmRig::make_default(false);
  const ArmRig left = ArmRig::make_default(true);
  CHECK(left.is_left);
  CHECK(left.shoulder_pos == mirror_x(right.shoulder_pos));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-30, 30);
  const HandPose pose = hand_pose_preset("peace");
  for (int i = 0; i < 200; ++i) {
    const Vec3 t = right.shoulder_pos + Vec3(u(rng), u(rng), -std::abs(u(rng)) - 10);
    const IkSolution r = solve_two_bone_ik(right, t);
    const IkSolution l = solve_two_bone_ik(left, mirror_x(t));
    CHECK((l.elbow - mirror_x(r.elbow)).norm() < 1e-9);
    CHECK((l.wrist - mirror_x(r.wrist)).norm() < 1e-9);
    const Vec3 aim = random_unit(rng);
    const auto kr = hand_keypoints(pose_hand(right, t, aim, pose));
    const auto kl = hand_keypoints(pose_hand(left, mirror_x(t), mirror_x(aim), pose));
    REQUIRE(kr.size() == kKeypointCount);
    for (int k = 0; k < kKeypointCount; ++k) CHECK((kl[k] - mirror_x(kr[k])).norm() < 1e-9);
  }
}

TEST_CASE("open palm fingertips lie at palm plus finger length from the wrist") {
  const ArmRig rig;
  const Vec3 wrist = rig.shoulder_pos + Vec3(0, 5, -40);
  const PosedSkeleton sk = pose_hand(rig, wrist, Vec3(0, 0, -1), hand_pose_preset("open_palm"));
  CHECK(sk.capsules.size() == 3 + 15);
  CHECK(sk.joints.size() == static_cast<std::size_t>(kJointCount));
  for (int f = 0; f < kFingerCount; ++f) {
    const auto& c = rig.fingers[f];
    const double expect = rig.palm_len + c.lengths[0] + c.lengths[1] + c.lengths[2];
    const Vec3 tip = sk.joints[finger_joint(f, kPhalanxCount)];
    CHECK((tip - sk.joints[kWrist]).norm() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zero-fan finger curled 90 degrees per joint matches planar forward kinematics") {
  ArmRig rig;
  rig.fingers[1].fan_deg = 0.0;
  rig.fingers[1].lengths = {2.0, 2.0, 2.0};
  HandPose pose = hand_pose_preset("open_palm");
  for (double curl : {90.0, 35.0, 110.0}) {
    pose.curl[1] = curl;
    const Vec3 wrist = rig.shoulder_pos + Vec3(5, 0, -40);
    const PosedSkeleton sk = pose_hand(rig, wrist, Vec3(0.2, 0.3, -1).normalized(), pose);
    const auto [x, y] = oracle::finger_fk_2d({2.0, 2.0, 2.0}, curl * M_PI / 180.0);
    const Vec3 knuckle = sk.joints[kWrist] + rig.palm_len * sk.hand.forward;
    const Vec3 expect = knuckle + x * sk.hand.forward + y * sk.hand.normal;
    CHECK((sk.joints[finger_joint(1, 3)] - expect).norm() < 1e-9);
  }
}

TEST_CASE("abduction on the index finger touches nothing else") {
  const ArmRig rig;
  const Vec3 wrist = rig.shoulder_pos + Vec3(0, 5, -40);
  HandPose pose = hand_pose_preset("open_palm");
  const auto base = hand_keypoints(pose_hand(rig, wrist, Vec3(0, 0.6, -0.8), pose));
  pose.abduction[1] = 10.0;
  const auto moved = hand_keypoints(pose_hand(rig, wrist, Vec3(0, 0.6, -0.8), pose));
  for (int k = 0; k < kKeypointCount; ++k) {
    if (k == 3) {
      CHECK(moved[k] != base[k]);
    } else {
      CHECK(moved[k] == base[k]);
    }
  }
}

TEST_CASE("keypoints of a straight arm along +X share Y and Z except for the spread") {
  ArmRig rig;
  rig.shoulder_pos = Vec3::Zero();
  for (auto& f : rig.fingers) f.fan_deg = 0.0;
  const PosedSkeleton sk = pose_hand(rig, Vec3(40, 0, 0), Vec3::UnitX(), hand_pose_preset("open_palm"));
  const auto kp = hand_keypoints(sk);
  CHECK(kp.size() == 7);
  for (const auto& p : kp) {
    CHECK(p.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.z() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("pose presets and clamping") {
  CHECK(is_hand_pose_preset("two_finger"));
  CHECK_FALSE(is_hand_pose_preset("fist"));
  CHECK_THROWS_AS(hand_pose_preset("fist"), InvariantError);
  HandPose p;
  p.curl[0] = 150;
  p.abduction[2] = -40;
  const HandPose c = p.clamped();
  CHECK(c.curl[0] == 110);
  CHECK(c.abduction[2] == -25);
}

TEST_CASE("rig validation") {
  ArmRig rig;
  CHECK_NOTHROW(rig.validate());
  rig.fore_len = 0;
  CHECK_THROWS_AS(rig.validate(), InvariantError);
  ArmRig pole;
  pole.elbow_pole = Vec3(1, 1, 0);
  CHECK_THROWS_AS(pole.validate(), InvariantError);
}

}
