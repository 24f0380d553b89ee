#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>

#include "gsynth/config.hpp"
#include "gsynth/errors.hpp"
#include "gsynth/evalkit.hpp"
#include "gsynth/generator.hpp"
#include "gsynth/output.hpp"

using namespace gsynth;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig load_or_default(const std::string& path) {
  return path.empty() ? parse_config("{}") : load_config(path);
}

struct GenerateArgs {
  std::string config, out, cameras, gestures;
  std::optional<std::uint64_t> seed;
  std::optional<int> variants;
  std::vector<std::string> conditions;
  int jobs = 1;
  bool force = false, json = false;
};

void apply_overrides(RunConfig& cfg, const GenerateArgs& a) {
  if (!a.out.empty()) cfg.general.output_path = a.out;
  if (a.seed) cfg.general.master_seed = *a.seed;
  if (a.variants) cfg.general.recordings_per_gesture = *a.variants;
  if (!a.gestures.empty()) cfg.general.gesture_names = split_list(a.gestures);
  if (!a.cameras.empty()) {
    const auto ids = split_list(a.cameras);
    for (const auto& id : ids) {
      if (!cfg.find_camera(id)) throw ConfigError("--cameras: unknown camera id '" + id + "'");
    }
    for (auto& c : cfg.cameras) c.active = std::find(ids.begin(), ids.end(), c.camera_id) != ids.end();
  }
  for (const auto& kv : a.conditions) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--condition: expected <param>=<low|median|high>, got '" + kv + "'");
    const auto p = parse_variation_param(kv.substr(0, eq));
    if (!p) throw ConfigError("--condition: unknown parameter '" + kv.substr(0, eq) + "'");
    const auto c = parse_range_condition(kv.substr(eq + 1));
    if (!c) throw ConfigError("--condition: unknown level '" + kv.substr(eq + 1) + "'");
    cfg.variation.condition_overrides[*p] = *c;
  }
  cfg.validate();
}

int run_generate(const GenerateArgs& a) {
  RunConfig cfg = load_or_default(a.config);
  apply_overrides(cfg, a);
  GenerateOptions opts;
  opts.jobs = a.jobs;
  opts.force = a.force;
  std::mutex mu;
  opts.progress = [&](std::size_t done, std::size_t total) {
    std::lock_guard lk(mu);
    std::cerr << "\rrecordings " << done << "/" << total << std::flush;
    if (done == total) std::cerr << "\n";
  };
  const GenerateSummary s = generate_dataset(cfg, opts);
  if (a.json) {
    const Json j = {{"recordings", s.recordings},
                    {"frames", s.frames},
                    {"warnings", {{"ik_clamps", s.warnings.ik_clamps}, {"arc_clamps", s.warnings.arc_clamps}}},
                    {"wall_seconds", s.wall_seconds},
                    {"output_path", s.output_path},
                    {"manifest", s.manifest_path},
                    {"config_digest", s.config_digest}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%-14s %s\n", "recordings", std::to_string(s.recordings).c_str());
    std::printf("%-14s %s\n", "frames", std::to_string(s.frames).c_str());
    std::printf("%-14s %d\n", "ik_clamps", s.warnings.ik_clamps);
    std::printf("%-14s %d\n", "arc_clamps", s.warnings.arc_clamps);
    std::printf("%-14s %.2f s\n", "wall_time", s.wall_seconds);
    std::printf("%-14s %s\n", "manifest", s.manifest_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic in-car hand gesture dataset generator"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Print the canonical effective configuration");
  validate->add_option("--config,config", validate_config, "Configuration file")->required();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Render every camera x gesture x variant recording");
  generate->add_option("--config", gen.config, "Configuration file (defaults when omitted)");
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--cameras", gen.cameras, "Comma-separated camera ids to render");
  generate->add_option("--gestures", gen.gestures, "Comma-separated gesture names");
  generate->add_option("--variants", gen.variants, "Recordings per gesture")->check(CLI::PositiveNumber);
  generate->add_option("--condition", gen.conditions, "Range condition <param>=<low|median|high>");
  generate->add_option("--jobs", gen.jobs, "Worker threads")->check(CLI::PositiveNumber);
  generate->add_flag("--force", gen.force, "Overwrite existing output");
  generate->add_flag("--json", gen.json, "Print the summary as JSON");

  std::string pv_config, pv_gesture, pv_camera = "depth0", pv_output;
  int pv_frame = 0, pv_variant = 0;
  auto* preview = app.add_subcommand("preview", "Render one frame to an image file");
  preview->add_option("--config", pv_config, "Configuration file (defaults when omitted)");
  preview->add_option("--gesture", pv_gesture, "Gesture name")->required();
  preview->add_option("--frame", pv_frame, "Frame index");
  preview->add_option("--camera", pv_camera, "Camera id");
  preview->add_option("--variant", pv_variant, "Variant index");
  preview->add_option("--output", pv_output, "Output image path (.pgm or .ppm)")->required();

  std::string ev_manifest, ev_mode = "separability", ev_config, ev_gesture = "swipe_right", ev_param;
  int ev_jobs = 1, ev_variants = 20;
  bool ev_no_isolate = false;
  auto* eval = app.add_subcommand("eval", "Trajectory-based dataset checks; prints a JSON report");
  eval->add_option("--manifest", ev_manifest, "Dataset manifest (separability, dispersion)");
  eval->add_option("--mode", ev_mode, "separability | dispersion | ablation")
      ->check(CLI::IsMember({"separability", "dispersion", "ablation"}));
  eval->add_option("--config", ev_config, "Configuration for ablation (defaults when omitted)");
  eval->add_option("--gesture", ev_gesture, "Gesture for ablation");
  eval->add_option("--param", ev_param, "Single ablation parameter (default: speed, position, finger spacing)");
  eval->add_option("--variants", ev_variants, "Variants per condition for ablation")->check(CLI::PositiveNumber);
  eval->add_flag("--no-isolate", ev_no_isolate, "Keep the other parameters at their configured ranges");
  eval->add_option("--jobs", ev_jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      std::cout << serialize_config(load_config(validate_config));
      return 0;
    }
    if (*generate) return run_generate(gen);
    if (*preview) {
      const RunConfig cfg = load_or_default(pv_config);
      const Frame f = render_preview(cfg, pv_gesture, pv_frame, pv_camera, pv_variant);
      write_frame(f, pv_output);
      std::cerr << "wrote " << pv_output << "\n";
      return 0;
    }
    if (*eval) {
      Json report = {{"mode", ev_mode}};
      if (ev_mode == "ablation") {
        const RunConfig cfg = load_or_default(ev_config);
        AblationOptions opts;
        opts.gesture = ev_gesture;
        opts.n_variants = ev_variants;
        opts.jobs = ev_jobs;
        opts.isolate = !ev_no_isolate;
        std::vector<VariationParam> params{VariationParam::SpeedOffset, VariationParam::PositionOffset,
                                           VariationParam::FingerSpacing};
        if (!ev_param.empty()) {
          const auto p = parse_variation_param(ev_param);
          if (!p) throw ConfigError("--param: unknown parameter '" + ev_param + "'");
          params = {*p};
        }
        report["gesture"] = ev_gesture;
        report["n_variants"] = ev_variants;
        report["isolate"] = opts.isolate;
        report["results"] = Json::array();
        for (auto p : params) report["results"].push_back(to_json(run_variance_ablation(cfg, p, opts)));
      } else {
        if (ev_manifest.empty()) throw ConfigError("--manifest is required for mode " + ev_mode);
        const fs::path mpath(ev_manifest);
        const DatasetManifest m = read_manifest(mpath);
        const auto items = load_trajectories(m, mpath.parent_path(), ev_jobs);
        report["recordings"] = items.size();
        if (ev_mode == "separability") {
          report["separability"] = to_json(leave_one_out(items, ev_jobs));
        } else {
          std::map<std::string, std::vector<Trajectory>> by_label;
          for (const auto& it : items) by_label[it.label].push_back(it.trajectory);
          Json d = Json::object();
          for (const auto& [label, ts] : by_label) d[label] = dispersion(ts);
          report["dispersion"] = d;
        }
      }
      std::cout << report.dump(2) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
