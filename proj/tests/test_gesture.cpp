#include <doctest.h>

#include <random>

#include "gsynth/errors.hpp"
#include "gsynth/gesture.hpp"
#include "oracles.hpp"

using namespace gsynth;

namespace {

VariantParams zero_variant() {
  VariantParams v;
  v.chromaticity_coeff = 1.0;
  v.depth_min = 20.0;
  v.depth_max = 150.0;
  return v;
}

GestureScript line_script(double length, double speed) {
  GestureScript s;
  s.name = "line";
  s.control_points = {Vec3(-length / 2, 0, 0), Vec3(length / 2, 0, 0)};
  s.base_speed = speed;
  return s;
}

const GestureScript& builtin(const std::string& name) {
  static const GestureRegistry reg = GestureRegistry::with_builtins();
  return reg.at(name);
}

}  // namespace

TEST_SUITE("gesture") {

TEST_CASE("two points give the straight segment") {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(30, 0, 0)};
  const auto sp = build_spline(pts, false);
  for (double u : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    const Vec3 p = sp.evaluate(u);
    CHECK(p.y() == 0.0);
    CHECK(p.z() == 0.0);
  }
  const auto table = arc_length_table(sp);
  CHECK(table.total_length == doctest::Approx(30.0).epsilon(1e-12));
  CHECK((position_at_arclength(sp, table, 15.0) - Vec3(15, 0, 0)).norm() < 1e-9);
  CHECK(position_at_arclength(sp, table, 0.0) == pts[0]);
  CHECK(position_at_arclength(sp, table, table.total_length) == pts[1]);
}

TEST_CASE("closed square passes through every corner") {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(10, 10, 0), Vec3(0, 10, 0)};
  const auto sp = build_spline(pts, true);
  CHECK(sp.segment_count() == 4);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((sp.evaluate(sp.control_parameter(i)) - pts[i]).norm() < 1e-9);
}

TEST_CASE("random five-point splines interpolate their control points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    const auto sp = build_spline(pts, trial % 2 == 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK((sp.evaluate(sp.control_parameter(i)) - pts[i]).norm() < 1e-9);
    }
  }
}

TEST_CASE("bad control points are rejected") {
  const std::vector<Vec3> one{Vec3(1, 2, 3)};
  CHECK_THROWS_AS(build_spline(one, false), InvariantError);
  const std::vector<Vec3> dup{Vec3(1, 2, 3), Vec3(1, 2, 3), Vec3(4, 5, 6)};
  CHECK_THROWS_AS(build_spline(dup, false), InvariantError);
}

TEST_CASE("8-point circle length against a dense polyline") {
  const GestureScript& rot = builtin("rotate_two_finger");
  const auto sp = build_spline(rot.control_points, true);
  const auto table = arc_length_table(sp);
  const double dense = oracle::dense_arc_length([&](double u) { return sp.evaluate(u); });
  CHECK(std::abs(table.total_length - dense) / dense < 0.005);
  CHECK(std::abs(table.total_length - 2 * M_PI * 8) / (2 * M_PI * 8) < 0.02);
  for (std::size_t i = 1; i < table.length.size(); ++i) CHECK(table.length[i] >= table.length[i - 1]);
  CHECK(table.length.back() == table.total_length);
}

TEST_CASE("built-in path lengths within 0.5% of the dense oracle") {
  for (const auto& g : builtin_gestures()) {
    if (g.is_static()) continue;
    const auto sp = build_spline(g.control_points, g.closed);
    const double dense = oracle::dense_arc_length([&](double u) { return sp.evaluate(u); });
    CHECK(std::abs(arc_length_table(sp).total_length - dense) / dense < 0.005);
  }
}

TEST_CASE("uniform arc-length steps are evenly spaced against a fine table") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-15, 15);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    const auto sp = build_spline(pts, false);
    const auto coarse = arc_length_table(sp);
    const auto fine = arc_length_table(sp, 100000);
    const double step = coarse.total_length / 60.0;
    for (int k = 1; k < 60; ++k) {
      // Measure along the curve with the fine table so chord shortening does not count.
      const double s0 = parameter_at_arclength(coarse, (k - 1) * step);
      const double s1 = parameter_at_arclength(coarse, k * step);
      auto arc_at = [&](double uu) {
        const auto it = std::lower_bound(fine.u.begin(), fine.u.end(), uu);
        const std::size_t i = std::min<std::size_t>(it - fine.u.begin(), fine.u.size() - 1);
        if (i == 0) return 0.0;
        const double t = (uu - fine.u[i - 1]) / (fine.u[i] - fine.u[i - 1]);
        return fine.length[i - 1] + t * (fine.length[i] - fine.length[i - 1]);
      };
      CHECK(std::abs(arc_at(s1) - arc_at(s0) - step) / step < 0.02);
    }
  }
}

TEST_CASE("out-of-range arc length clamps and counts") {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(10, 0, 0)};
  const auto sp = build_spline(pts, false);
  const auto table = arc_length_table(sp);
  WarningCounters w;
  CHECK(position_at_arclength(sp, table, -1.0, &w) == pts[0]);
  CHECK(position_at_arclength(sp, table, 11.0, &w) == pts[1]);
  CHECK(w.arc_clamps == 2);
}

TEST_CASE("straight 30 cm gesture timeline has 12 + 30 + 12 frames") {
  GestureScript s = line_script(30.0, 30.0);
  s.pre_speed = 60.0;
  s.post_speed = 60.0;
  const Vec3 anchor(0, 0, 0);
  // 24 cm from both ends of the segment.
  const Vec3 rest_sym = anchor + Vec3(0, -std::sqrt(24.0 * 24.0 - 15.0 * 15.0), 0);
  const Timeline tl = plan_timeline(s, rest_sym, anchor, 30.0, zero_variant());
  REQUIRE(tl.phases.size() == 3);
  CHECK(tl.phases[0].kind == PhaseKind::PreGesture);
  CHECK(tl.phases[0].frame_count() == 12);
  CHECK(tl.phases[1].frame_count() == 30);
  CHECK(tl.phases[2].frame_count() == 12);
  CHECK(tl.total_frames == 54);
  CHECK_NOTHROW(tl.check_tiling());
  CHECK(tl.label_span() == LabelSpan{12, 41, 0});
}

TEST_CASE("static peace sign holds for exactly 30 frames") {
  const Timeline tl = plan_timeline(builtin("peace_sign"), Vec3(0, -20, 10), Vec3(0, 0, 0), 30.0, zero_variant());
  int hold = 0;
  for (const auto& p : tl.phases) {
    if (p.kind == PhaseKind::Hold) hold += p.frame_count();
    CHECK(p.kind != PhaseKind::Gesture);
  }
  CHECK(hold == 30);
}

TEST_CASE("effective speed clamps at 5 cm/s") {
  GestureScript s = line_script(30.0, 25.0);
  VariantParams v = zero_variant();
  v.speed_offset = -25.0;
  const Timeline tl = plan_timeline(s, Vec3(0, -20, 0), Vec3(0, 0, 0), 30.0, v);
  CHECK(tl.phases[1].speed == kMinGestureSpeed);
  CHECK(tl.phases[1].frame_count() == phase_frames(30.0, 5.0, 30.0));
  CHECK(tl.phases[1].frame_count() == 180);
}

TEST_CASE("phase frame arithmetic") {
  CHECK(phase_frames(0.0, 40, 30) == 0);
  CHECK(phase_frames(10.0, 40, 30) == 8);
  CHECK(phase_frames(30.0, 30, 30) == 30);
  CHECK(phase_frames(1e-6, 50, 30) == 1);
}

TEST_CASE("chain transitions") {
  GestureScript a = line_script(20.0, 40.0);
  a.name = "a";
  GestureScript b = a;
  b.name = "b";
  b.control_points = {Vec3(10, 0, 0), Vec3(10, 20, 0)};
  const std::vector<GestureScript> touching{a, b};
  const Timeline t0 = plan_chain(touching, Vec3(0, -20, 0), Vec3(0, 0, 0), 30.0, zero_variant());
  int transitions = 0;
  for (const auto& p : t0.phases) {
    if (p.kind == PhaseKind::Transition) {
      ++transitions;
      CHECK(p.frame_count() == 0);
    }
  }
  CHECK(transitions == 1);
  CHECK_NOTHROW(t0.check_tiling());

  // swipe_right then swipe_up with a 10 cm gap at mean speed 40 cm/s.
  GestureScript right = builtin("swipe_right");
  GestureScript up = builtin("swipe_up");
  up.control_points = {Vec3(15, -10, 0), Vec3(15, 14, 0)};
  const std::vector<GestureScript> gap{right, up};
  const Timeline t1 = plan_chain(gap, Vec3(0, -20, 0), Vec3(0, 0, 0), 30.0, zero_variant());
  int sum = 0;
  for (const auto& p : t1.phases) {
    sum += p.frame_count();
    if (p.kind == PhaseKind::Transition) CHECK(p.frame_count() == 8);
  }
  CHECK(sum == t1.total_frames);
  CHECK(t1.gesture_spans.size() == 2);
}

TEST_CASE("first and last frame sit at rest; mid gesture frame at the path midpoint") {
  const ArmRig rig;
  const GesturePlacement place = GesturePlacement::make_default(rig);
  GestureScript s = line_script(30.0, 30.0);
  const std::vector<GestureScript> scripts{s};
  const Timeline tl = plan_timeline(s, place.rest_pos, place.anchor, 30.0, zero_variant());
  CHECK(evaluate_frame(tl, 0, scripts, rig, zero_variant()).wrist_target == place.rest_pos);
  CHECK(evaluate_frame(tl, tl.total_frames - 1, scripts, rig, zero_variant()).wrist_target == place.rest_pos);
  const Phase& g = tl.phases[1];
  REQUIRE(g.frame_count() == 30);
  const Vec3 mid = evaluate_frame(tl, g.start_frame + 15, scripts, rig, zero_variant()).wrist_target;
  CHECK((mid - place.anchor).norm() < 1e-9);
  CHECK_THROWS_AS(evaluate_frame(tl, tl.total_frames, scripts, rig, zero_variant()), InvariantError);
}

TEST_CASE("gesture-phase targets advance at v/fps") {
  const ArmRig rig;
  const GesturePlacement place = GesturePlacement::make_default(rig);
  for (const auto& g : builtin_gestures()) {
    if (g.is_static()) continue;
    const std::vector<GestureScript> scripts{g};
    VariantParams v = zero_variant();
    v.speed_offset = 25.0;
    const Timeline tl = plan_timeline(g, place.rest_pos, place.anchor, 30.0, v);
    for (const auto& p : tl.phases) {
      if (p.kind != PhaseKind::Gesture) continue;
      const double step = p.speed / tl.fps;
      for (int f = p.start_frame + 1; f < p.end_frame - 1; ++f) {
        const Vec3 a = evaluate_frame(tl, f - 1, scripts, rig, v).wrist_target;
        const Vec3 b = evaluate_frame(tl, f, scripts, rig, v).wrist_target;
        CHECK(std::abs((b - a).norm() - step) / step < 0.02);
      }
    }
  }
}

TEST_CASE("a one-gesture chain matches single mode") {
  const ArmRig rig;
  const GesturePlacement place = GesturePlacement::make_default(rig);
  const GestureScript& g = builtin("swipe_up");
  const std::vector<GestureScript> scripts{g};
  const Timeline single = plan_timeline(g, place.rest_pos, place.anchor, 30.0, zero_variant());
  const Timeline chain = plan_chain(scripts, place.rest_pos, place.anchor, 30.0, zero_variant());
  REQUIRE(single.total_frames == chain.total_frames);
  for (int f = 0; f < single.total_frames; ++f) {
    CHECK(evaluate_frame(single, f, scripts, rig, zero_variant()).wrist_target ==
          evaluate_frame(chain, f, scripts, rig, zero_variant()).wrist_target);
  }
}

TEST_CASE("hand arm part holds the wrist during the gesture") {
  const ArmRig rig;
  const GesturePlacement place = GesturePlacement::make_default(rig);
  GestureScript g = builtin("swipe_right");
  g.arm_part = ArmPart::Hand;
  const std::vector<GestureScript> scripts{g};
  const Timeline tl = plan_timeline(g, place.rest_pos, place.anchor, 30.0, zero_variant());
  const Phase& p = tl.phases[1];
  const Vec3 w0 = evaluate_frame(tl, p.start_frame, scripts, rig, zero_variant()).wrist_target;
  Vec3 aim0 = evaluate_frame(tl, p.start_frame, scripts, rig, zero_variant()).aim_dir;
  bool aim_changed = false;
  for (int f = p.start_frame; f < p.end_frame; ++f) {
    const FrameTarget t = evaluate_frame(tl, f, scripts, rig, zero_variant());
    CHECK(t.wrist_target == w0);
    CHECK(t.aim_dir.norm() == doctest::Approx(1.0));
    aim_changed |= (t.aim_dir - aim0).norm() > 1e-3;
  }
  CHECK(aim_changed);
}

TEST_CASE("script validation and registry") {
  GestureScript s;
  s.name = "bad";
  s.control_points = {Vec3(0, 0, 0)};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.static_hold_s = 1.0;
  CHECK_NOTHROW(s.validate());
  s.base_speed = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  const auto reg = GestureRegistry::with_builtins();
  CHECK(reg.names().size() == 6);
  CHECK_THROWS_AS(reg.at("wave"), ConfigError);
}

}
