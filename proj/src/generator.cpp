#include "gsynth/generator.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "gsynth/errors.hpp"

#ifndef GSYNTH_VERSION
#define GSYNTH_VERSION "0.0.0"
#endif

namespace gsynth {

std::string_view tool_version() { return GSYNTH_VERSION; }

std::vector<RecordingPlan> plan_recordings(const RunConfig& cfg) {
  const GestureRegistry reg = cfg.registry();
  std::vector<std::vector<GestureScript>> groups;
  if (cfg.general.mode == GenerationMode::Chain) {
    std::vector<GestureScript> chain;
    for (const auto& n : cfg.general.gesture_names) chain.push_back(reg.at(n));
    groups.push_back(std::move(chain));
  } else {
    for (const auto& n : cfg.general.gesture_names) groups.push_back({reg.at(n)});
  }
  std::vector<RecordingPlan> plans;
  for (std::size_t c = 0; c < cfg.cameras.size(); ++c) {
    const CameraSpec& cam = cfg.cameras[c];
    if (!cam.active) continue;
    for (const auto& scripts : groups) {
      std::string label;
      for (const auto& s : scripts) label += (label.empty() ? "" : "+") + s.name;
      for (int v = 0; v < cfg.general.recordings_per_gesture; ++v) {
        RecordingPlan p;
        p.label = label;
        p.scripts = scripts;
        p.variant_index = v;
        p.camera_index = c;
        p.seed = derive_seed(cfg.general.master_seed, label, v, cam.camera_id);
        p.left_hand = cfg.general.default_left_hand || scripts.front().use_left_hand;
        plans.push_back(std::move(p));
      }
    }
  }
  return plans;
}

PreparedRecording prepare_recording(const RunConfig& cfg, const RecordingPlan& plan) {
  const CameraSpec& cam = cfg.cameras.at(plan.camera_index);
  PreparedRecording r;
  r.variant = sample_variant(cfg.variation, cfg.variation.condition_overrides, plan.seed, plan.variant_index);
  r.rig = cfg.rig.rig_for(plan.left_hand);
  const GesturePlacement place = cfg.rig.placement_for(plan.left_hand);
  r.timeline = plan.scripts.size() == 1
                   ? plan_timeline(plan.scripts.front(), place.rest_pos, place.anchor, cam.fps, r.variant)
                   : plan_chain(plan.scripts, place.rest_pos, place.anchor, cam.fps, r.variant);
  r.timeline.check_tiling();
  r.noise = FlipbookNoise::generate(cam.sensor.flipbook, plan.seed);
  return r;
}

namespace {

RecordingEntry make_entry(const RecordingPlan& plan, const CameraSpec& cam, const PreparedRecording& r) {
  RecordingEntry e;
  e.gesture_label = plan.label;
  e.variant_index = plan.variant_index;
  e.camera_id = cam.camera_id;
  e.kind = cam.kind;
  e.frame_dir = recording_dir(cam.camera_id, plan.label, plan.variant_index);
  e.frame_count = r.timeline.total_frames;
  e.fps = cam.fps;
  e.resolution = cam.resolution;
  const LabelSpan span = r.timeline.label_span();
  e.label_first = span.first;
  e.label_last = span.last;
  for (const auto& s : r.timeline.gesture_spans) {
    e.segments.push_back({plan.scripts.at(s.script_index).name, s.first, s.last});
  }
  e.variant_params = r.variant;
  e.seed = plan.seed;
  return e;
}

struct StaticCache {
  RayGrid rays;
  DepthBuffer layer;
};

StaticCache build_cache(const CameraSpec& cam, const ArmRig& rig, const SceneOptions& opts) {
  StaticCache c{RayGrid(cam), DepthBuffer(cam.resolution.width, cam.resolution.height)};
  const Scene statics = build_static_scene(rig, opts);
  trace_into(c.layer, c.rays, statics.primitives);
  return c;
}

RecordingEntry render_with_cache(const RunConfig& cfg, const RecordingPlan& plan, const StaticCache* cache,
                                 const std::function<void(Frame&&)>& sink) {
  const CameraSpec& cam = cfg.cameras.at(plan.camera_index);
  const PreparedRecording r = prepare_recording(cfg, plan);
  RecordingSetup setup;
  setup.timeline = &r.timeline;
  setup.scripts = plan.scripts;
  setup.rig = &r.rig;
  setup.camera = &cam;
  setup.variant = &r.variant;
  setup.noise = &r.noise;
  setup.scene = cfg.scene;
  RecordingEntry e = make_entry(plan, cam, r);
  if (cache) {
    for (int f = 0; f < r.timeline.total_frames; ++f) {
      sink(render_frame(setup, f, cache->rays, &cache->layer, &e.warnings));
    }
  } else {
    render_sequence(setup, sink, &e.warnings);
  }
  return e;
}

}  // namespace

RecordingEntry render_recording(const RunConfig& cfg, const RecordingPlan& plan,
                                const std::function<void(Frame&&)>& sink) {
  return render_with_cache(cfg, plan, nullptr, sink);
}

Frame render_preview(const RunConfig& cfg, const std::string& gesture, int frame_index,
                     const std::string& camera_id, int variant_index) {
  const CameraSpec* cam = cfg.find_camera(camera_id);
  if (!cam) throw ConfigError("cameras: unknown camera id '" + camera_id + "'");
  const GestureScript script = cfg.registry().at(gesture);
  if (variant_index < 0) throw ConfigError("variant index must be >= 0");
  RecordingPlan plan;
  plan.label = gesture;
  plan.scripts = {script};
  plan.variant_index = variant_index;
  plan.camera_index = static_cast<std::size_t>(cam - cfg.cameras.data());
  plan.seed = derive_seed(cfg.general.master_seed, gesture, variant_index, camera_id);
  plan.left_hand = cfg.general.default_left_hand || script.use_left_hand;
  const PreparedRecording r = prepare_recording(cfg, plan);
  if (frame_index < 0 || frame_index >= r.timeline.total_frames) {
    throw ConfigError("frame index " + std::to_string(frame_index) + " outside [0, " +
                      std::to_string(r.timeline.total_frames) + ")");
  }
  RecordingSetup setup;
  setup.timeline = &r.timeline;
  setup.scripts = plan.scripts;
  setup.rig = &r.rig;
  setup.camera = cam;
  setup.variant = &r.variant;
  setup.noise = &r.noise;
  setup.scene = cfg.scene;
  return render_frame(setup, frame_index, RayGrid(*cam), nullptr);
}

bool has_existing_output(const RunConfig& cfg, const fs::path& out) {
  std::error_code ec;
  if (fs::exists(out / "manifest.json", ec)) return true;
  for (const auto& c : cfg.cameras) {
    if (fs::exists(out / c.camera_id, ec)) return true;
  }
  return false;
}

GenerateSummary generate_dataset(const RunConfig& cfg, const GenerateOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  const fs::path out(cfg.general.output_path);
  if (has_existing_output(cfg, out)) {
    if (!opts.force) {
      throw IoError("output directory '" + out.string() +
                    "' already holds a dataset or partial output; use --force to overwrite");
    }
    std::error_code ec;
    fs::remove(out / "manifest.json", ec);
    for (const auto& c : cfg.cameras) {
      fs::remove_all(out / c.camera_id, ec);
      if (ec) throw IoError("cannot remove '" + (out / c.camera_id).string() + "': " + ec.message());
    }
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());

  const std::vector<RecordingPlan> plans = plan_recordings(cfg);

  // Static layers depend only on camera and hand side.
  std::map<std::pair<std::size_t, bool>, StaticCache> caches;
  for (const auto& p : plans) {
    const auto key = std::make_pair(p.camera_index, p.left_hand);
    if (!caches.count(key)) {
      caches.emplace(key, build_cache(cfg.cameras[p.camera_index], cfg.rig.rig_for(p.left_hand), cfg.scene));
    }
  }

  std::vector<RecordingEntry> entries(plans.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      {
        std::lock_guard lk(failure_mu);
        if (failure) return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= plans.size()) return;
      try {
        const RecordingPlan& p = plans[i];
        const CameraSpec& cam = cfg.cameras[p.camera_index];
        const fs::path dir = out / recording_dir(cam.camera_id, p.label, p.variant_index);
        const StaticCache& cache = caches.at({p.camera_index, p.left_hand});
        int idx = 0;
        entries[i] = render_with_cache(cfg, p, &cache, [&](Frame&& f) {
          write_frame(f, dir / frame_file_name(idx++, cam.kind));
        });
        const std::size_t d = done.fetch_add(1) + 1;
        if (opts.progress) opts.progress(d, plans.size());
      } catch (...) {
        std::lock_guard lk(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  DatasetManifest m;
  m.tool_version = std::string(tool_version());
  m.config_digest = config_digest(cfg);
  for (const auto* c : cfg.active_cameras()) m.cameras.push_back(*c);
  m.entries = std::move(entries);
  const fs::path manifest_path = out / "manifest.json";
  write_manifest(m, manifest_path);

  GenerateSummary s;
  s.recordings = m.entries.size();
  for (const auto& e : m.entries) {
    s.frames += static_cast<std::size_t>(e.frame_count);
    s.warnings += e.warnings;
  }
  s.output_path = out.string();
  s.manifest_path = manifest_path.string();
  s.config_digest = m.config_digest;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace gsynth
