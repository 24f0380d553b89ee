#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gsynth/config.hpp"
#include "gsynth/errors.hpp"
#include "gsynth/evalkit.hpp"
#include "gsynth/generator.hpp"
#include "gsynth/json_io.hpp"
#include "gsynth/output.hpp"

namespace py = pybind11;
using namespace gsynth;

namespace {

RangeCondition condition(const std::string& s) {
  const auto c = parse_range_condition(s);
  if (!c) throw ConfigError("unknown range condition '" + s + "'");
  return *c;
}

VariationParam param(const std::string& s) {
  const auto p = parse_variation_param(s);
  if (!p) throw ConfigError("unknown variation parameter '" + s + "'");
  return *p;
}

py::array frame_to_array(const Frame& f) {
  if (f.kind == FrameKind::Depth16) {
    py::array_t<std::uint16_t> a({f.height, f.width});
    std::copy(f.depth.begin(), f.depth.end(), a.mutable_data());
    return a;
  }
  py::array_t<std::uint8_t> a({f.height, f.width, 3});
  std::copy(f.rgb.begin(), f.rgb.end(), a.mutable_data());
  return a;
}

std::vector<Vec3> to_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw InvariantError("expected an (N, 3) array");
  std::vector<Vec3> out;
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) out.emplace_back(r(i, 0), r(i, 1), r(i, 2));
  return out;
}

py::array_t<double> from_points(const std::vector<Vec3>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < 3; ++k) w(i, k) = pts[i][k];
  }
  return a;
}

}  // namespace

PYBIND11_MODULE(_gsynth, m) {
  m.doc() = "Core bindings; see the gsynth package for the documented API.";
  m.attr("__version__") = std::string(tool_version());

  static py::exception<Error> base(m, "Error");
  static py::exception<ConfigError> config_exc(m, "ConfigError", base.ptr());
  static py::exception<IoError> io_exc(m, "IoError", base.ptr());
  static py::exception<InvariantError> inv_exc(m, "InvariantError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_exc(e.what());
    } catch (const IoError& e) {
      io_exc(e.what());
    } catch (const InvariantError& e) {
      inv_exc(e.what());
    }
  });

  m.def("scale_range", [](double lo, double hi, const std::string& cond) {
    const ParamRange r = scale_range({lo, hi}, condition(cond));
    return std::make_pair(r.lo, r.hi);
  });
  m.def("derive_seed", &derive_seed, py::arg("master_seed"), py::arg("gesture"), py::arg("variant_index"),
        py::arg("camera_id"));
  m.def("sample_variant", [](const std::string& config_json, std::uint64_t seed, int index) {
    const RunConfig cfg = parse_config(config_json);
    return to_json(sample_variant(cfg.variation, cfg.variation.condition_overrides, seed, index)).dump();
  });

  m.def("solve_two_bone_ik", [](const Vec3& target, bool left) {
    const IkSolution s = solve_two_bone_ik(ArmRig::make_default(left), target);
    return py::make_tuple(s.elbow, s.wrist, s.clamped);
  }, py::arg("target"), py::arg("left") = false);
  m.def("hand_keypoints", [](const Vec3& wrist, const Vec3& aim, const std::string& preset, bool left) {
    return from_points(hand_keypoints(pose_hand(ArmRig::make_default(left), wrist, aim.normalized(),
                                                hand_pose_preset(preset))));
  }, py::arg("wrist"), py::arg("aim"), py::arg("preset") = "open_palm", py::arg("left") = false);

  m.def("builtin_gestures", [] {
    std::vector<std::string> names;
    for (const auto& g : builtin_gestures()) names.push_back(g.name);
    return names;
  });
  m.def("timeline", [](const std::string& config_json, const std::string& gesture, int variant_index) {
    const RunConfig cfg = parse_config(config_json);
    const GestureScript& g = cfg.registry().at(gesture);
    const auto v = sample_variant(cfg.variation, cfg.variation.condition_overrides,
                                  derive_seed(cfg.general.master_seed, gesture, variant_index, "depth0"), variant_index);
    const auto place = cfg.rig.placement_for(cfg.general.default_left_hand || g.use_left_hand);
    const Timeline tl = plan_timeline(g, place.rest_pos, place.anchor, cfg.general.fps, v);
    py::list phases;
    for (const auto& p : tl.phases) {
      py::dict d;
      d["kind"] = std::string(to_string(p.kind));
      d["start_frame"] = p.start_frame;
      d["end_frame"] = p.end_frame;
      d["speed"] = p.speed;
      d["length"] = p.path.length();
      phases.append(d);
    }
    py::dict out;
    out["phases"] = phases;
    out["total_frames"] = tl.total_frames;
    out["label_span"] = py::make_tuple(tl.label_span().first, tl.label_span().last);
    return out;
  });

  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); });
  m.def("config_digest", [](const std::string& text) { return config_digest(parse_config(text)); });

  m.def("render_preview", [](const std::string& config_json, const std::string& gesture, int frame,
                             const std::string& camera, int variant) {
    Frame f;
    {
      py::gil_scoped_release release;
      f = render_preview(parse_config(config_json), gesture, frame, camera, variant);
    }
    return frame_to_array(f);
  }, py::arg("config_json"), py::arg("gesture"), py::arg("frame"), py::arg("camera") = "depth0",
        py::arg("variant") = 0);

  m.def("generate", [](const std::string& config_json, const std::string& out, int jobs, bool force) {
    RunConfig cfg = parse_config(config_json);
    if (!out.empty()) cfg.general.output_path = out;
    GenerateSummary s;
    {
      py::gil_scoped_release release;
      s = generate_dataset(cfg, {jobs, force, {}});
    }
    py::dict d;
    d["recordings"] = s.recordings;
    d["frames"] = s.frames;
    d["ik_clamps"] = s.warnings.ik_clamps;
    d["arc_clamps"] = s.warnings.arc_clamps;
    d["wall_seconds"] = s.wall_seconds;
    d["manifest"] = s.manifest_path;
    d["config_digest"] = s.config_digest;
    return d;
  }, py::arg("config_json"), py::arg("out") = "", py::arg("jobs") = 1, py::arg("force") = false);

  m.def("read_frame", [](const std::filesystem::path& p) { return frame_to_array(read_frame(p)); });
  m.def("read_manifest", [](const std::filesystem::path& p) { return manifest_to_string(read_manifest(p)); });
  m.def("slice_by_ratio", [](const std::filesystem::path& p, double ratio, int base) {
    std::vector<py::tuple> out;
    for (const auto& e : slice_by_ratio(read_manifest(p).entries, ratio, base)) {
      out.push_back(py::make_tuple(e.camera_id, e.gesture_label, e.variant_index));
    }
    return out;
  });

  m.def("dtw_distance", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                           const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
    return dtw_distance(to_points(a), to_points(b));
  });
  m.def("trajectory", [](const std::string& config_json, const std::string& gesture, int variant,
                         const std::string& camera) {
    LabeledTrajectory t;
    {
      py::gil_scoped_release release;
      t = trajectory_for(parse_config(config_json), gesture, variant, camera);
    }
    return py::make_tuple(from_points(t.trajectory.points), t.trajectory.confidence);
  }, py::arg("config_json"), py::arg("gesture"), py::arg("variant") = 0, py::arg("camera") = "");
  m.def("separability", [](const std::filesystem::path& manifest, int jobs) {
    std::string out;
    {
      py::gil_scoped_release release;
      const DatasetManifest man = read_manifest(manifest);
      out = to_json(leave_one_out(load_trajectories(man, manifest.parent_path(), jobs), jobs)).dump();
    }
    return out;
  }, py::arg("manifest"), py::arg("jobs") = 1);
  m.def("variance_ablation", [](const std::string& config_json, const std::string& p, int n_variants,
                                const std::string& gesture, bool isolate, int jobs) {
    AblationOptions opts;
    opts.gesture = gesture;
    opts.n_variants = n_variants;
    opts.isolate = isolate;
    opts.jobs = jobs;
    std::string out;
    {
      py::gil_scoped_release release;
      out = to_json(run_variance_ablation(parse_config(config_json), param(p), opts)).dump();
    }
    return out;
  }, py::arg("config_json"), py::arg("param"), py::arg("n_variants") = 20, py::arg("gesture") = "swipe_right",
        py::arg("isolate") = true, py::arg("jobs") = 1);
}
