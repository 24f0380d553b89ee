#include "gsynth/gesture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsynth/errors.hpp"

namespace gsynth {

std::string_view to_string(ArmPart p) {
  switch (p) {
    case ArmPart::Arm: return "arm";
    case ArmPart::Hand: return "hand";
    case ArmPart::Finger: return "finger";
  }
  return "arm";
}

std::optional<ArmPart> parse_arm_part(std::string_view s) {
  if (s == "arm") return ArmPart::Arm;
  if (s == "hand") return ArmPart::Hand;
  if (s == "finger") return ArmPart::Finger;
  return std::nullopt;
}

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::PreGesture: return "pre_gesture";
    case PhaseKind::Gesture: return "gesture";
    case PhaseKind::Transition: return "transition";
    case PhaseKind::Hold: return "hold";
    case PhaseKind::PostGesture: return "post_gesture";
  }
  return "";
}

void GestureScript::validate() const {
  const std::string where = "gesture '" + name + "': ";
  if (name.empty()) throw ConfigError("gesture.name must not be empty");
  if (static_hold_s < 0.0 || !std::isfinite(static_hold_s)) {
    throw ConfigError(where + "static_hold_s must be >= 0");
  }
  if (is_static()) {
    if (control_points.size() != 1) {
      throw ConfigError(where + "control_points: static gestures need exactly one point");
    }
  } else if (control_points.size() < 2) {
    throw ConfigError(where + "control_points: dynamic gestures need at least two points");
  }
  for (std::size_t i = 0; i < control_points.size(); ++i) {
    if (!control_points[i].allFinite()) throw ConfigError(where + "control_points must be finite");
    if (i > 0 && control_points[i] == control_points[i - 1]) {
      throw ConfigError(where + "control_points: duplicate consecutive points");
    }
  }
  if (closed && !is_static() && control_points.front() == control_points.back()) {
    throw ConfigError(where + "control_points: closed path repeats its first point");
  }
  if (!(base_speed > 0.0)) throw ConfigError(where + "base_speed must be > 0");
  if (!(pre_speed > 0.0)) throw ConfigError(where + "pre_speed must be > 0");
  if (!(post_speed > 0.0)) throw ConfigError(where + "post_speed must be > 0");
  if (!(turns > 0.0) || !std::isfinite(turns)) throw ConfigError(where + "turns must be > 0");
  if (!is_hand_pose_preset(hand_pose)) {
    throw ConfigError(where + "hand_pose: unknown preset '" + hand_pose + "'");
  }
  double prev_t = -1.0;
  for (const auto& key : pose_track) {
    if (!(key.t >= 0.0 && key.t <= 1.0) || key.t <= prev_t) {
      throw ConfigError(where + "pose_track: keyframe t must increase within [0, 1]");
    }
    prev_t = key.t;
  }
}

std::vector<GestureScript> builtin_gestures() {
  std::vector<GestureScript> out;

  GestureScript swipe_right;
  swipe_right.name = "swipe_right";
  swipe_right.control_points = {Vec3(-15, 0, 0), Vec3(15, 0, 0)};
  swipe_right.hand_pose = "open_palm";
  out.push_back(swipe_right);

  GestureScript swipe_up;
  swipe_up.name = "swipe_up";
  swipe_up.control_points = {Vec3(0, -12, 0), Vec3(0, 12, 0)};
  swipe_up.hand_pose = "open_palm";
  out.push_back(swipe_up);

  GestureScript two_finger = swipe_right;
  two_finger.name = "swipe_right_two_finger";
  two_finger.hand_pose = "two_finger";
  out.push_back(two_finger);

  GestureScript peace;
  peace.name = "peace_sign";
  peace.control_points = {Vec3(0, 0, 0)};
  peace.static_hold_s = 1.0;
  peace.hand_pose = "peace";
  out.push_back(peace);

  GestureScript rotate;
  rotate.name = "rotate_two_finger";
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 8.0;
    rotate.control_points.emplace_back(8.0 * std::cos(a), 8.0 * std::sin(a), 0.0);
  }
  rotate.closed = true;
  rotate.turns = 1.25;
  rotate.base_speed = 30.0;
  rotate.hand_pose = "two_finger";
  out.push_back(rotate);

  GestureScript point;
  point.name = "point_two_finger";
  point.control_points = {Vec3(0, 0, 0), Vec3(0, 0, -10)};
  point.base_speed = 30.0;
  point.hand_pose = "point";
  out.push_back(point);

  return out;
}

GestureRegistry GestureRegistry::with_builtins() {
  GestureRegistry reg;
  for (auto& g : builtin_gestures()) reg.add(std::move(g));
  return reg;
}

void GestureRegistry::add(GestureScript script) {
  script.validate();
  std::string key = script.name;
  scripts_.insert_or_assign(std::move(key), std::move(script));
}

const GestureScript* GestureRegistry::find(std::string_view name) const {
  auto it = scripts_.find(name);
  return it == scripts_.end() ? nullptr : &it->second;
}

const GestureScript& GestureRegistry::at(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw ConfigError("gestures: unknown gesture '" + std::string(name) + "'");
}

std::vector<std::string> GestureRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : scripts_) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Catmull-Rom

CatmullRomSpline::CatmullRomSpline(std::vector<Vec3> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
  if (points_.size() < 2) throw InvariantError("spline needs at least two control points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i] == points_[i - 1]) {
      throw InvariantError("spline has duplicate consecutive control points");
    }
  }
  if (closed_ && points_.front() == points_.back()) {
    throw InvariantError("closed spline repeats its first control point");
  }
  segments_ = static_cast<int>(closed_ ? points_.size() : points_.size() - 1);
}

const Vec3& CatmullRomSpline::point(int i) const {
  const int n = static_cast<int>(points_.size());
  if (closed_) return points_[((i % n) + n) % n];
  return points_[std::clamp(i, 0, n - 1)];
}

void CatmullRomSpline::locate(double u, int& seg, double& t) const {
  const double x = std::clamp(u, 0.0, 1.0) * segments_;
  seg = static_cast<int>(std::floor(x));
  if (seg >= segments_) {
    seg = segments_ - 1;
    t = 1.0;
  } else {
    t = x - seg;
  }
}

Vec3 CatmullRomSpline::evaluate(double u) const {
  int seg = 0;
  double t = 0.0;
  locate(u, seg, t);
  if (t == 0.0) return point(seg);
  if (t == 1.0) return point(seg + 1);
  const Vec3& p0 = point(seg - 1);
  const Vec3& p1 = point(seg);
  const Vec3& p2 = point(seg + 1);
  const Vec3& p3 = point(seg + 2);
  const double t2 = t * t;
  const double t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

Vec3 CatmullRomSpline::derivative(double u) const {
  int seg = 0;
  double t = 0.0;
  locate(u, seg, t);
  const Vec3& p0 = point(seg - 1);
  const Vec3& p1 = point(seg);
  const Vec3& p2 = point(seg + 1);
  const Vec3& p3 = point(seg + 2);
  const Vec3 dt = 0.5 * ((p2 - p0) + 2.0 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t +
                         3.0 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t);
  return dt * static_cast<double>(segments_);
}

CatmullRomSpline build_spline(std::span<const Vec3> points, bool closed) {
  return CatmullRomSpline(std::vector<Vec3>(points.begin(), points.end()), closed);
}

ArcTable arc_length_table(const CatmullRomSpline& spline, int samples) {
  if (samples < 2) throw InvariantError("arc length table needs at least two samples");
  ArcTable table;
  table.u.resize(samples);
  table.length.resize(samples);
  Vec3 prev = spline.evaluate(0.0);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u = (i == samples - 1) ? 1.0 : static_cast<double>(i) / (samples - 1);
    const Vec3 p = spline.evaluate(u);
    acc += (p - prev).norm();
    prev = p;
    table.u[i] = u;
    table.length[i] = acc;
  }
  table.total_length = acc;
  return table;
}

double parameter_at_arclength(const ArcTable& table, double s) {
  if (s <= 0.0) return table.u.front();
  if (s >= table.total_length) return table.u.back();
  auto it = std::upper_bound(table.length.begin(), table.length.end(), s);
  const auto i = static_cast<std::size_t>(it - table.length.begin());
  const double l0 = table.length[i - 1];
  const double l1 = table.length[i];
  const double f = l1 > l0 ? (s - l0) / (l1 - l0) : 0.0;
  return table.u[i - 1] + f * (table.u[i] - table.u[i - 1]);
}

Vec3 position_at_arclength(const CatmullRomSpline& spline, const ArcTable& table, double s,
                           WarningCounters* warnings) {
  if (s < 0.0 || s > table.total_length) {
    if (warnings) ++warnings->arc_clamps;
    s = std::clamp(s, 0.0, table.total_length);
  }
  return spline.evaluate(parameter_at_arclength(table, s));
}

// ---------------------------------------------------------------------------
// PhasePath

PhasePath PhasePath::point(const Vec3& p) {
  PhasePath path;
  path.kind_ = Kind::Point;
  path.a_ = path.b_ = p;
  return path;
}

PhasePath PhasePath::line(const Vec3& a, const Vec3& b) {
  PhasePath path;
  path.a_ = a;
  path.b_ = b;
  path.length_ = (b - a).norm();
  path.kind_ = path.length_ > 0.0 ? Kind::Line : Kind::Point;
  return path;
}

PhasePath PhasePath::spline(std::shared_ptr<const CatmullRomSpline> curve,
                            std::shared_ptr<const ArcTable> table, const Vec3& origin,
                            double turns) {
  PhasePath path;
  path.kind_ = Kind::Spline;
  path.a_ = origin;
  path.length_ = table->total_length * (curve->closed() ? turns : 1.0);
  path.curve_ = std::move(curve);
  path.table_ = std::move(table);
  return path;
}

Vec3 PhasePath::position(double s, WarningCounters* warnings) const {
  switch (kind_) {
    case Kind::Point: return a_;
    case Kind::Line:
      if (s <= 0.0) return a_;
      if (s >= length_) return b_;
      return a_ + (b_ - a_) * (s / length_);
    case Kind::Spline: {
      if (s < 0.0 || s > length_) {
        if (warnings) ++warnings->arc_clamps;
        s = std::clamp(s, 0.0, length_);
      }
      double local = s;
      if (curve_->closed() && s > table_->total_length) local = std::fmod(s, table_->total_length);
      return a_ + position_at_arclength(*curve_, *table_, local);
    }
  }
  return a_;
}

Vec3 PhasePath::tangent(double s) const {
  switch (kind_) {
    case Kind::Point: return Vec3::Zero();
    case Kind::Line: return (b_ - a_) / length_;
    case Kind::Spline: {
      double local = std::clamp(s, 0.0, length_);
      if (curve_->closed() && local > table_->total_length) {
        local = std::fmod(local, table_->total_length);
      }
      const Vec3 d = curve_->derivative(parameter_at_arclength(*table_, local));
      const double n = d.norm();
      return n > 1e-12 ? Vec3(d / n) : Vec3::Zero();
    }
  }
  return Vec3::Zero();
}

// ---------------------------------------------------------------------------
// Timeline

LabelSpan Timeline::label_span() const {
  if (gesture_spans.empty()) return {};
  return {gesture_spans.front().first, gesture_spans.back().last, gesture_spans.front().script_index};
}

const Phase& Timeline::phase_at(int frame) const {
  if (frame < 0 || frame >= total_frames) {
    throw InvariantError("frame " + std::to_string(frame) + " outside timeline of " +
                         std::to_string(total_frames) + " frames");
  }
  for (const auto& p : phases) {
    if (frame >= p.start_frame && frame < p.end_frame) return p;
  }
  throw InvariantError("timeline phases do not cover frame " + std::to_string(frame));
}

void Timeline::check_tiling() const {
  int cursor = 0;
  for (const auto& p : phases) {
    if (p.start_frame != cursor || p.end_frame < p.start_frame) {
      throw InvariantError("timeline phases do not tile the frame range");
    }
    cursor = p.end_frame;
  }
  if (cursor != total_frames) throw InvariantError("timeline phases do not end at total_frames");
  for (const auto& span : gesture_spans) {
    if (span.first < 0 || span.last >= total_frames || span.first > span.last) {
      throw InvariantError("label span outside the timeline");
    }
  }
}

GesturePlacement GesturePlacement::make_default(const ArmRig& rig) {
  Vec3 rest(-10.0, -15.0, -25.0);
  Vec3 anchor(0.0, 5.0, -45.0);
  if (rig.is_left) {
    rest = mirror_x(rest);
    anchor = mirror_x(anchor);
  }
  return {rig.shoulder_pos + rest, rig.shoulder_pos + anchor};
}

int phase_frames(double length, double speed, double fps) {
  if (!(length > 1e-12)) return 0;
  // The small slack keeps exact multiples (24 cm at 60 cm/s, 30 fps -> 12) from
  // rounding up on representation error.
  const double frames = std::ceil(length / speed * fps - 1e-9);
  return std::max(1, static_cast<int>(frames));
}

namespace {

struct PlannedGesture {
  PhasePath path;
  Vec3 entry;
  Vec3 exit;
};

PlannedGesture plan_gesture_path(const GestureScript& script, const Vec3& origin) {
  PlannedGesture g;
  if (script.is_static()) {
    g.path = PhasePath::point(origin + script.control_points.front());
  } else {
    auto curve = std::make_shared<const CatmullRomSpline>(script.control_points, script.closed);
    auto table = std::make_shared<const ArcTable>(arc_length_table(*curve));
    g.path = PhasePath::spline(curve, table, origin, script.turns);
  }
  g.entry = g.path.start();
  g.exit = script.arm_part == ArmPart::Arm ? g.path.end() : g.entry;
  return g;
}

void push_phase(Timeline& tl, PhaseKind kind, PhasePath path, double speed, int script_index,
                int frames) {
  Phase p;
  p.kind = kind;
  p.start_frame = tl.total_frames;
  p.end_frame = tl.total_frames + frames;
  p.path = std::move(path);
  p.speed = speed;
  p.script_index = script_index;
  tl.total_frames = p.end_frame;
  tl.phases.push_back(std::move(p));
}

Timeline plan_sequence(std::span<const GestureScript> scripts, const Vec3& rest_pos,
                       const Vec3& anchor, double fps, const VariantParams& variant) {
  if (scripts.empty()) throw InvariantError("timeline needs at least one gesture script");
  if (!(fps >= 1.0)) throw InvariantError("fps must be >= 1");
  const Vec3 origin = anchor + variant.position_offset;

  std::vector<PlannedGesture> planned;
  planned.reserve(scripts.size());
  for (const auto& s : scripts) planned.push_back(plan_gesture_path(s, origin));

  Timeline tl;
  tl.fps = fps;
  {
    PhasePath pre = PhasePath::line(rest_pos, planned.front().entry);
    const double v = scripts.front().pre_speed;
    push_phase(tl, PhaseKind::PreGesture, pre, v, 0, phase_frames(pre.length(), v, fps));
  }
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const int idx = static_cast<int>(i);
    const GestureScript& script = scripts[i];
    if (i > 0) {
      PhasePath tr = PhasePath::line(planned[i - 1].exit, planned[i].entry);
      const double v = 0.5 * (scripts[i - 1].base_speed + script.base_speed);
      push_phase(tl, PhaseKind::Transition, tr, v, idx, phase_frames(tr.length(), v, fps));
    }
    const int first = tl.total_frames;
    if (script.is_static()) {
      const int frames = static_cast<int>(std::lround(script.static_hold_s * fps));
      push_phase(tl, PhaseKind::Hold, planned[i].path, 0.0, idx, frames);
    } else {
      const double v = std::max(kMinGestureSpeed, script.base_speed + variant.speed_offset);
      push_phase(tl, PhaseKind::Gesture, planned[i].path, v, idx,
                 phase_frames(planned[i].path.length(), v, fps));
    }
    tl.gesture_spans.push_back({first, tl.total_frames - 1, idx});
  }
  {
    PhasePath post = PhasePath::line(planned.back().exit, rest_pos);
    const double v = scripts.back().post_speed;
    push_phase(tl, PhaseKind::PostGesture, post, v, static_cast<int>(scripts.size()) - 1,
               phase_frames(post.length(), v, fps));
  }
  return tl;
}

std::array<double, kFingerCount> lerp(const std::array<double, kFingerCount>& a,
                                      const std::array<double, kFingerCount>& b, double f) {
  std::array<double, kFingerCount> out{};
  for (int i = 0; i < kFingerCount; ++i) out[i] = a[i] + (b[i] - a[i]) * f;
  return out;
}

HandPose base_pose(const GestureScript& script, double progress) {
  HandPose pose = hand_pose_preset(script.hand_pose);
  const auto& track = script.pose_track;
  if (track.empty()) return pose;
  if (progress <= track.front().t) {
    pose.curl = track.front().curl;
    pose.abduction = track.front().abduction;
  } else if (progress >= track.back().t) {
    pose.curl = track.back().curl;
    pose.abduction = track.back().abduction;
  } else {
    for (std::size_t i = 1; i < track.size(); ++i) {
      if (progress <= track[i].t) {
        const auto& k0 = track[i - 1];
        const auto& k1 = track[i];
        const double f = (progress - k0.t) / (k1.t - k0.t);
        pose.curl = lerp(k0.curl, k1.curl, f);
        pose.abduction = lerp(k0.abduction, k1.abduction, f);
        break;
      }
    }
  }
  return pose;
}

}  // namespace

Timeline plan_timeline(const GestureScript& script, const Vec3& rest_pos, const Vec3& anchor,
                       double fps, const VariantParams& variant) {
  return plan_sequence(std::span<const GestureScript>(&script, 1), rest_pos, anchor, fps, variant);
}

Timeline plan_chain(std::span<const GestureScript> scripts, const Vec3& rest_pos,
                    const Vec3& anchor, double fps, const VariantParams& variant) {
  return plan_sequence(scripts, rest_pos, anchor, fps, variant);
}

Vec3 default_aim_direction() { return Vec3(0.0, 0.6, -0.8); }

FrameTarget evaluate_frame(const Timeline& timeline, int frame,
                           std::span<const GestureScript> scripts, const ArmRig& rig,
                           const VariantParams& variant, WarningCounters* warnings) {
  const Phase& phase = timeline.phase_at(frame);
  if (phase.script_index < 0 || phase.script_index >= static_cast<int>(scripts.size())) {
    throw InvariantError("timeline refers to a script outside the given list");
  }
  const GestureScript& script = scripts[phase.script_index];
  const int k = frame - phase.start_frame;
  // Post-gesture samples end exactly on the rest position.
  const int step = phase.kind == PhaseKind::PostGesture ? k + 1 : k;
  const double length = phase.path.length();
  const double s = std::min(step * phase.speed / timeline.fps, length);
  const Vec3 pos = phase.path.position(s, warnings);

  FrameTarget out;
  out.phase = phase.kind;
  const double progress = length > 0.0 ? s / length : 0.0;
  out.pose = phase.kind == PhaseKind::Gesture ? base_pose(script, progress)
                                              : hand_pose_preset(script.hand_pose);
  for (int f = 0; f < kFingerCount; ++f) {
    out.pose.curl[f] += variant.finger_rotation_offsets[f];
    out.pose.abduction[f] += variant.finger_spacing_offsets[f];
  }
  out.pose.wrist_rotation = variant.hand_orientation_offset;

  const bool aiming = phase.kind == PhaseKind::Gesture && script.arm_part != ArmPart::Arm;
  if (aiming) {
    // The arm holds still at the phase start; the moving path point becomes
    // an aim target for the hand (Hand) or the fingers (Finger).
    const Vec3 hold = phase.path.start();
    const Vec3 disp = pos - hold;
    const double reach = rig.hand_reach();
    out.wrist_target = hold;
    if (script.arm_part == ArmPart::Hand) {
      out.aim_dir = (default_aim_direction().normalized() * reach + disp).normalized();
    } else {
      out.aim_dir = default_aim_direction().normalized();
      const HandFrame hf = hand_frame(out.aim_dir, rig.is_left);
      const double spread = rad_to_deg(std::atan2(disp.dot(hf.side), reach));
      const double bend = rad_to_deg(std::atan2(disp.dot(hf.normal), reach));
      for (int f = 0; f < kFingerCount; ++f) {
        out.pose.abduction[f] += spread;
        out.pose.curl[f] += bend;
      }
    }
  } else {
    out.wrist_target = pos;
    const Vec3 t = phase.kind == PhaseKind::Hold ? Vec3::Zero() : phase.path.tangent(s);
    out.aim_dir = t.squaredNorm() > 0.0 ? t : default_aim_direction().normalized();
  }
  out.pose = out.pose.clamped();
  return out;
}

}  // namespace gsynth
