#include "gsynth/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "gsynth/errors.hpp"
#include "gsynth/generator.hpp"

namespace gsynth {

namespace {

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lk(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Trajectory extract_trajectory(std::span<const Frame> frames, const CameraSpec& cam, const RecordingEntry& entry) {
  if (frames.empty()) throw InvariantError("extract_trajectory: no frames");
  const int w = cam.resolution.width;
  const int h = cam.resolution.height;
  for (const auto& f : frames) {
    if (f.kind != FrameKind::Depth16 || f.width != w || f.height != h) {
      throw InvariantError("extract_trajectory: expected " + std::to_string(w) + "x" + std::to_string(h) +
                           " depth frames");
    }
  }
  const SensorParams sp = effective_sensor(cam.sensor, entry.variant_params);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> bg(static_cast<std::size_t>(w) * h);
  const Frame& f0 = frames.front();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::uint16_t c = f0.depth[static_cast<std::size_t>(v) * w + u];
      double d = c ? decode_depth16(c, sp) : -1.0;
      if (d < 0.0) {
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int uu = u + du, vv = v + dv;
            if (uu < 0 || vv < 0 || uu >= w || vv >= h) continue;
            const std::uint16_t cn = f0.depth[static_cast<std::size_t>(vv) * w + uu];
            if (cn) d = std::max(d, decode_depth16(cn, sp));
          }
        }
        if (d < 0.0) d = inf;
      }
      bg[static_cast<std::size_t>(v) * w + u] = d;
    }
  }

  std::vector<Vec3> dirs(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) dirs[static_cast<std::size_t>(v) * w + u] = camera_ray(cam, u, v).dir;
  }

  const int first = std::max(0, entry.label_first);
  const int last = std::min<int>(entry.label_last, static_cast<int>(frames.size()) - 1);
  if (last < first) throw InvariantError("extract_trajectory: empty label span");
  Trajectory t;
  std::vector<bool> have;
  int good = 0;
  for (int k = first; k <= last; ++k) {
    const Frame& f = frames[k];
    Vec3 sum = Vec3::Zero();
    int count = 0;
    for (std::size_t i = 0; i < f.depth.size(); ++i) {
      if (!f.depth[i]) continue;
      const double d = decode_depth16(f.depth[i], sp);
      if (d < bg[i] - kForegroundMargin) {
        sum += d * dirs[i];
        ++count;
      }
    }
    const bool ok = count >= kMinForegroundPixels;
    good += ok;
    have.push_back(ok);
    t.points.push_back(ok ? Vec3(cam.position + sum / count) : Vec3::Zero());
  }
  if (good == 0) throw InvariantError("extract_trajectory: no foreground in '" + entry.frame_dir + "'");
  // Carry the last good centroid forward, then backfill the leading gap.
  std::size_t first_good = 0;
  while (!have[first_good]) ++first_good;
  for (std::size_t i = first_good + 1; i < t.points.size(); ++i) {
    if (!have[i]) t.points[i] = t.points[i - 1];
  }
  for (std::size_t i = 0; i < first_good; ++i) t.points[i] = t.points[first_good];
  t.confidence = static_cast<double>(good) / static_cast<double>(t.points.size());
  return t;
}

double dtw_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) throw InvariantError("dtw_distance: empty trajectory");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = (a[i - 1] - b[j - 1]).norm();
      cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::string classify_1nn(std::span<const LabeledTrajectory> dataset, const Trajectory& query) {
  if (dataset.empty()) throw InvariantError("classify_1nn: empty dataset");
  const LabeledTrajectory* best = nullptr;
  double best_d = 0.0;
  for (const auto& item : dataset) {
    const double d = dtw_distance(item.trajectory, query);
    if (!best || d < best_d ||
        (d == best_d && std::tie(item.label, item.variant_index) < std::tie(best->label, best->variant_index))) {
      best = &item;
      best_d = d;
    }
  }
  return best->label;
}

std::vector<std::vector<double>> distance_matrix(std::span<const LabeledTrajectory> items, int jobs) {
  const std::size_t n = items.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    d[i][j] = d[j][i] = dtw_distance(items[i].trajectory, items[j].trajectory);
  });
  return d;
}

SeparabilityReport leave_one_out(std::span<const LabeledTrajectory> items, int jobs) {
  SeparabilityReport r;
  const auto d = distance_matrix(items, jobs);
  for (std::size_t q = 0; q < items.size(); ++q) {
    std::size_t best = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i == q) continue;
      if (best == items.size() || d[q][i] < d[q][best] ||
          (d[q][i] == d[q][best] && std::tie(items[i].label, items[i].variant_index) <
                                        std::tie(items[best].label, items[best].variant_index))) {
        best = i;
      }
    }
    if (best == items.size()) continue;
    ++r.samples;
    const std::string& truth = items[q].label;
    const std::string& pred = items[best].label;
    r.correct += truth == pred;
    ++r.confusion[truth][pred];
  }
  r.accuracy = r.samples ? static_cast<double>(r.correct) / static_cast<double>(r.samples) : 0.0;
  return r;
}

double dispersion(std::span<const Trajectory> items) {
  if (items.size() < 2) return 0.0;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      sum += dtw_distance(items[i], items[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

namespace {

const CameraSpec& pick_depth_camera(const RunConfig& cfg, const std::string& id) {
  for (const auto& c : cfg.cameras) {
    if (!id.empty() ? c.camera_id == id : (c.active && c.kind == CameraKind::Depth)) {
      if (c.kind != CameraKind::Depth) throw ConfigError("camera '" + c.camera_id + "' is not a depth camera");
      return c;
    }
  }
  throw ConfigError(id.empty() ? "cameras: no active depth camera" : "cameras: unknown camera id '" + id + "'");
}

}  // namespace

LabeledTrajectory trajectory_for(const RunConfig& cfg_in, const std::string& gesture, int variant_index,
                                 const std::string& camera_id, const ConditionMap& conditions) {
  RunConfig cfg = cfg_in;
  for (const auto& [p, c] : conditions) cfg.variation.condition_overrides[p] = c;
  const CameraSpec& cam = pick_depth_camera(cfg, camera_id);
  const GestureScript script = cfg.registry().at(gesture);
  RecordingPlan plan;
  plan.label = gesture;
  plan.scripts = {script};
  plan.variant_index = variant_index;
  plan.camera_index = static_cast<std::size_t>(&cam - cfg.cameras.data());
  plan.seed = derive_seed(cfg.general.master_seed, gesture, variant_index, cam.camera_id);
  plan.left_hand = cfg.general.default_left_hand || script.use_left_hand;
  std::vector<Frame> frames;
  const RecordingEntry e = render_recording(cfg, plan, [&](Frame&& f) { frames.push_back(std::move(f)); });
  return {extract_trajectory(frames, cam, e), gesture, variant_index};
}

std::vector<LabeledTrajectory> load_trajectories(const DatasetManifest& m, const fs::path& root, int jobs) {
  std::vector<const RecordingEntry*> depth;
  for (const auto& e : m.entries) {
    if (e.kind == CameraKind::Depth) depth.push_back(&e);
  }
  std::vector<LabeledTrajectory> out(depth.size());
  parallel_for(depth.size(), jobs, [&](std::size_t i) {
    const RecordingEntry& e = *depth[i];
    const CameraSpec* cam = m.find_camera(e.camera_id);
    if (!cam) throw IoError("manifest: entry references unknown camera '" + e.camera_id + "'");
    std::vector<Frame> frames;
    for (int k = 0; k < e.frame_count; ++k) {
      frames.push_back(read_frame(root / e.frame_dir / frame_file_name(k, e.kind)));
    }
    out[i] = {extract_trajectory(frames, *cam, e), e.gesture_label, e.variant_index};
  });
  return out;
}

AblationResult run_variance_ablation(const RunConfig& cfg_in, VariationParam param, const AblationOptions& opts) {
  if (opts.n_variants < 1) throw ConfigError("ablation: n_variants must be >= 1");
  RunConfig base = cfg_in;
  if (opts.isolate) {
    VariationConfig& v = base.variation;
    auto collapse = [](ParamRange& r) { r = {r.center(), r.center()}; };
    if (param != VariationParam::SpeedOffset) collapse(v.speed_offset);
    if (param != VariationParam::PositionOffset) {
      for (auto& r : v.position_offset) collapse(r);
    }
    if (param != VariationParam::FingerSpacing) collapse(v.finger_spacing);
    if (param != VariationParam::FingerRotation) collapse(v.finger_rotation);
    if (param != VariationParam::HandOrientation) collapse(v.hand_orientation);
    if (param != VariationParam::ChromaticityCoeff) collapse(v.chromaticity_coeff);
    if (param != VariationParam::DepthMin) collapse(v.depth_min);
    if (param != VariationParam::DepthMax) collapse(v.depth_max);
    v.condition_overrides.clear();
  }
  AblationResult res;
  res.param = param;
  const RangeCondition conds[3] = {RangeCondition::Low, RangeCondition::Median, RangeCondition::High};
  for (int c = 0; c < 3; ++c) {
    const ConditionMap cm{{param, conds[c]}};
    std::vector<Trajectory> trajs(static_cast<std::size_t>(opts.n_variants));
    parallel_for(trajs.size(), opts.jobs, [&](std::size_t i) {
      trajs[i] = trajectory_for(base, opts.gesture, static_cast<int>(i), opts.camera_id, cm).trajectory;
    });
    res.dispersion[c] = dispersion(trajs);
  }
  return res;
}

Json to_json(const SeparabilityReport& r) {
  Json conf = Json::object();
  for (const auto& [t, row] : r.confusion) {
    for (const auto& [p, n] : row) conf[t][p] = n;
  }
  return {{"samples", r.samples}, {"correct", r.correct}, {"accuracy", r.accuracy}, {"confusion", conf}};
}

Json to_json(const AblationResult& r) {
  return {{"parameter", std::string(to_string(r.param))},
          {"dispersion",
           {{"low", r.dispersion[0]}, {"median", r.dispersion[1]}, {"high", r.dispersion[2]}}}};
}

}  // namespace gsynth
