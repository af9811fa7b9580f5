/**
 * Copyright 2026 The radkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// radkit command-line driver. Exit codes: 0 ok, 2 config error, 3 data
// error, 4 numerical abort.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "radkit/augment.hpp"
#include "radkit/encoder.hpp"
#include "radkit/error.hpp"
#include "radkit/eval.hpp"
#include "radkit/io.hpp"
#include "radkit/simulator.hpp"
#include "radkit/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace radkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

constexpr uint64_t kAugmentStream = 0xA06;

void check_thread_env() {
  const char* env = std::getenv("RADKIT_THREADS");
  if (env == nullptr) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1)
    throw ConfigError(std::string("RADKIT_THREADS must be a positive integer, got '") + env + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoFailure("cannot create directory '" + dir.string() + "'", 0);
}

// A config file that is missing or malformed is a config error, not a
// data error.
json load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file '" + path.string() + "' not found");
  try {
    return read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

template <typename T>
T config_as(const json& doc, const fs::path& path) {
  try {
    return doc.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Paths inside a config resolve against the config file's directory.
fs::path config_path(const json& doc, const char* key, const fs::path& config_file) {
  if (!doc.contains(key) || !doc.at(key).is_string())
    throw ConfigError(config_file.string() + ": missing string field '" + key + "'");
  const fs::path p = doc.at(key).get<std::string>();
  return p.is_absolute() ? p : config_file.parent_path() / p;
}

EncoderParams load_params(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw DataError("checkpoint '" + path.string() + "' not found");
  return read_checkpoint(path).params;
}

template <typename T>
T json_file_as(const fs::path& path) {
  const json doc = read_json_file(path);
  try {
    return doc.get<T>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct GenScenesArgs {
  size_t count = 0;
  uint64_t seed = 0;
  size_t scatterers_min = 1;
  size_t scatterers_max = 3;
  double speed_max = 0.0;
  double visibility_min = 1.0;
  std::string grid;
  std::string out;
};

int run_gen_scenes(const GenScenesArgs& a) {
  SceneGenConfig cfg;
  cfg.scatterers_min = a.scatterers_min;
  cfg.scatterers_max = a.scatterers_max;
  cfg.speed_max = a.speed_max;
  cfg.visibility_min = a.visibility_min;
  cfg.validate();
  const PolarGrid grid = a.grid.empty() ? default_grid() : config_as<PolarGrid>(load_config(a.grid), a.grid);
  grid.validate();
  ensure_dir(a.out);
  const RngStream rng = scene_stream(a.seed);
  for (size_t i = 0; i < a.count; ++i) {
    const Scene scene = generate_scene(i, grid, cfg, rng);
    write_scene(scene, fs::path(a.out) / (scene.id + ".json"));
  }
  std::cerr << "gen-scenes: wrote " << a.count << " scenes to " << a.out << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string scenes;
  std::string geometry;
  std::string grid;
  std::string out;
  uint64_t seed = 0;
  SimConfig sim;
};

int run_simulate(const SimulateArgs& a) {
  a.sim.validate();
  const ArrayGeometry geometry =
      a.geometry.empty() ? default_geometry() : config_as<ArrayGeometry>(load_config(a.geometry), a.geometry);
  geometry.validate();
  const PolarGrid grid = a.grid.empty() ? default_grid() : config_as<PolarGrid>(load_config(a.grid), a.grid);
  grid.validate();
  if (!fs::is_directory(a.scenes)) throw DataError("scenes directory '" + a.scenes + "' not found");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.scenes))
    if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  ensure_dir(a.out);
  json entries = json::array();
  for (size_t i = 0; i < files.size(); ++i) {
    const Scene scene = read_scene(files[i]);
    const std::string stem = files[i].stem().string();
    const VirtualArrayTensor tensor = synthesize_tensor(scene, geometry, grid, a.sim, simulation_stream(a.seed, i));
    write_scene(scene, fs::path(a.out) / (stem + ".json"));
    write_tensor(tensor, fs::path(a.out) / (stem + ".rst"));
    entries.push_back({{"scene", stem + ".json"}, {"tensor", stem + ".rst"}});
  }
  write_json_file(json{{"geometry", geometry}, {"grid", grid}, {"entries", entries}}, fs::path(a.out) / "manifest.json");
  std::cerr << "simulate: wrote " << files.size() << " tensors to " << a.out << "\n";
  return kExitOk;
}

struct AugmentArgs {
  std::string in;
  std::string spec;
  std::string out;
  uint64_t seed = 0;
};

int run_augment(const AugmentArgs& a) {
  const AugmentationSpec spec =
      a.spec.empty() ? AugmentationSpec::defaults() : config_as<AugmentationSpec>(load_config(a.spec), a.spec);
  spec.validate();
  const VirtualArrayTensor tensor = read_tensor(a.in);
  const ViewPair views = make_views(tensor, spec, RngStream(a.seed, kAugmentStream), a.in);
  ensure_dir(a.out);
  write_heatmap(views.view_a, fs::path(a.out) / "view_a.hmp");
  write_heatmap(views.view_b, fs::path(a.out) / "view_b.hmp");
  return kExitOk;
}

struct RenderArgs {
  std::string in;
  std::string out;
};

int run_render(const RenderArgs& a) {
  const std::string magic = peek_magic(a.in);
  Heatmap map;
  if (magic == "HMP1")
    map = read_heatmap(a.in);
  else if (magic == "RST1")
    map = integrate_heatmap(read_tensor(a.in));
  else
    throw FormatError("'" + a.in + "' is neither a heatmap nor a tensor file", 0);
  if (!map.is_valid()) throw DataError("render: heatmap contains non-finite or negative values");

  const auto [lo_it, hi_it] = std::minmax_element(map.data.begin(), map.data.end());
  const double lo = map.data.empty() ? 0.0 : *lo_it;
  const double hi = map.data.empty() ? 0.0 : *hi_it;
  std::vector<uint8_t> pixels(map.size(), 128);
  if (hi > lo) {
    for (size_t i = 0; i < map.size(); ++i)
      pixels[i] = static_cast<uint8_t>(std::lround(255.0 * (map.data[i] - lo) / (hi - lo)));
  } else {
    std::cerr << "render: warning: heatmap is constant; writing mid-gray\n";
  }
  const std::string header =
      "P5\n" + std::to_string(map.num_azimuth) + " " + std::to_string(map.num_range) + "\n255\n";
  std::vector<uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  write_file_bytes(a.out, bytes);
  return kExitOk;
}

struct JobArgs {
  std::string config;
  std::string out;
};

int run_pretrain(const JobArgs& a) {
  const fs::path cfg_file = a.config;
  const json doc = load_config(cfg_file);
  TrainConfig cfg = config_as<TrainConfig>(doc, cfg_file);
  cfg.validate();
  const Dataset ds = load_dataset(config_path(doc, "dataset_path", cfg_file));
  const fs::path out = a.out;
  ensure_dir(out);

  std::ofstream metrics(out / "metrics.jsonl", std::ios::binary);
  if (!metrics) throw IoFailure("cannot open '" + (out / "metrics.jsonl").string() + "'", 0);
  PretrainHooks hooks;
  hooks.on_step = [&](const StepLog& s) { metrics << json(s).dump() << "\n"; };
  hooks.on_checkpoint = [&](const EncoderParams& p, uint64_t step) {
    write_checkpoint(p, step, out / ("checkpoint_" + std::to_string(step) + ".ckp"));
  };
  const PretrainResult r = pretrain(cfg, ds, hooks);
  metrics.close();
  write_checkpoint(r.initial, 0, out / "init.ckp");
  write_checkpoint(r.params, r.steps, out / "checkpoint.ckp");

  json report{{"steps", r.steps},
              {"fallback_count", r.fallback_count},
              {"teacher_hash_before", r.teacher_hash_before},
              {"teacher_hash_after", r.teacher_hash_after},
              {"teacher_frozen", r.teacher_hash_before == r.teacher_hash_after},
              {"config", cfg}};
  if (!r.log.empty()) report["final"] = r.log.back();
  write_json_file(report, out / "report.json");
  if (r.fallback_count > 0)
    std::cerr << "pretrain: warning: " << r.fallback_count << " zero-norm projections mapped to e1\n";
  return kExitOk;
}

int run_probe(const JobArgs& a) {
  const fs::path cfg_file = a.config;
  const json doc = load_config(cfg_file);
  const ProbeConfig cfg = config_as<ProbeConfig>(doc, cfg_file);
  cfg.validate();
  const fs::path ckpt = config_path(doc, "checkpoint", cfg_file);
  const fs::path data = config_path(doc, "dataset_path", cfg_file);
  const EncoderParams params = load_params(ckpt);
  const Dataset ds = load_dataset(data);
  const ProbeReport rep = linear_probe(params, ds, cfg);
  ensure_dir(a.out);
  write_json_file(json{{"config", cfg}, {"report", rep}}, fs::path(a.out) / "probe_report.json");
  std::cout << "rmse " << rep.rmse << " m (target std " << rep.target_std << " m)\n";
  return kExitOk;
}

int run_sweep(const JobArgs& a) {
  const fs::path cfg_file = a.config;
  const json doc = load_config(cfg_file);
  const ProbeConfig cfg = config_as<ProbeConfig>(doc, cfg_file);
  cfg.validate();
  std::vector<double> fractions = default_label_fractions();
  if (doc.contains("fractions")) fractions = config_as<std::vector<double>>(doc.at("fractions"), cfg_file);
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep: fractions must be in (0, 1]");
  const EncoderParams pre = load_params(config_path(doc, "checkpoint", cfg_file));
  const EncoderParams init = load_params(config_path(doc, "init_checkpoint", cfg_file));
  const Dataset ds = load_dataset(config_path(doc, "dataset_path", cfg_file));
  const std::vector<SweepRow> rows = label_efficiency_sweep(pre, init, ds, fractions, cfg);
  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"fraction", row.fraction}, {"pretrained", row.pretrained}, {"random_init", row.random_init}});
    std::printf("%6.2f%%  pretrained %.4f  random %.4f\n", 100.0 * row.fraction, row.pretrained.rmse,
                row.random_init.rmse);
  }
  ensure_dir(a.out);
  write_json_file(json{{"config", cfg}, {"rows", table}}, fs::path(a.out) / "sweep.json");
  return kExitOk;
}

int run_eval_det(const JobArgs& a) {
  const fs::path cfg_file = a.config;
  const json doc = load_config(cfg_file);
  const auto dets = json_file_as<std::vector<Detection>>(config_path(doc, "detections", cfg_file));
  const auto gts = json_file_as<std::vector<Detection>>(config_path(doc, "ground_truth", cfg_file));
  for (const auto& d : dets)
    if (!d.box.score) throw DataError("eval-det: detection in frame '" + d.frame_id + "' has no score");
  const DetectionReport rep = evaluate_detections(dets, gts);
  ensure_dir(a.out);
  write_json_file(json(rep), fs::path(a.out) / "det_report.json");
  std::printf("ap50 %.4f  ap75 %.4f  map %.4f\n", rep.overall.ap50, rep.overall.ap75, rep.overall.map);
  return kExitOk;
}

int run_retrieval(const JobArgs& a) {
  const fs::path cfg_file = a.config;
  const json doc = load_config(cfg_file);
  const RetrievalConfig cfg = config_as<RetrievalConfig>(doc, cfg_file);
  cfg.validate();
  const EncoderParams params = load_params(config_path(doc, "checkpoint", cfg_file));
  const Dataset ds = load_dataset(config_path(doc, "dataset_path", cfg_file));
  const RetrievalReport rep = evaluate_retrieval(params, ds, cfg);
  ensure_dir(a.out);
  write_json_file(json{{"config", cfg}, {"report", rep}}, fs::path(a.out) / "retrieval.json");
  std::printf("radar-radar top-%zu %.4f  radar-vision top-%zu %.4f (view prototype %.4f)  chance %.4f\n", rep.k,
              rep.radar_radar, rep.k, rep.radar_vision, rep.radar_vision_prototype, rep.chance);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radkit: synthetic MIMO radar pretraining toolkit"};
  app.require_subcommand(1);
  int result = kExitOk;

  GenScenesArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-scenes", "Generate synthetic scene JSON files");
  gen_cmd->add_option("--count", gen.count, "Number of scenes")->required();
  gen_cmd->add_option("--seed", gen.seed, "Scene seed");
  gen_cmd->add_option("--scatterers-min", gen.scatterers_min, "Minimum scatterers per scene")->capture_default_str();
  gen_cmd->add_option("--scatterers-max", gen.scatterers_max, "Maximum scatterers per scene")->capture_default_str();
  gen_cmd->add_option("--speed-max", gen.speed_max, "Maximum |radial velocity|, m/s")->capture_default_str();
  gen_cmd->add_option("--visibility-min", gen.visibility_min, "Lower bound of specular visibility")
      ->capture_default_str();
  gen_cmd->add_option("--grid", gen.grid, "Polar grid JSON (default 32x32)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->callback([&] { result = run_gen_scenes(gen); });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize virtual-array tensors for a scene directory");
  sim_cmd->add_option("--scenes", sim.scenes, "Scene directory")->required();
  sim_cmd->add_option("--geometry", sim.geometry, "Array geometry JSON (default 3x4 ULA)");
  sim_cmd->add_option("--grid", sim.grid, "Polar grid JSON (default 32x32)");
  sim_cmd->add_option("--out", sim.out, "Output dataset directory")->required();
  sim_cmd->add_option("--seed", sim.seed, "Simulation seed");
  sim_cmd->add_option("--noise-floor", sim.sim.noise_floor, "Complex noise std per cell")->capture_default_str();
  sim_cmd->add_option("--range-spread", sim.sim.range_spread_bins, "Range sinc half-width, bins")
      ->capture_default_str();
  sim_cmd->add_option("--tx-dwell", sim.sim.tx_dwell, "Seconds per TX slot (Doppler phase)")->capture_default_str();
  sim_cmd->add_option("--wavelength", sim.sim.carrier_wavelength, "Carrier wavelength, m")->capture_default_str();
  sim_cmd->callback([&] { result = run_simulate(sim); });

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment", "Draw two augmented heatmap views of a tensor");
  aug_cmd->add_option("--in", aug.in, "Input tensor (RST1)")->required();
  aug_cmd->add_option("--spec", aug.spec, "Augmentation spec JSON (default RMM + center crop + hflip)");
  aug_cmd->add_option("--seed", aug.seed, "View seed");
  aug_cmd->add_option("--out", aug.out, "Output directory for view_a.hmp and view_b.hmp")->required();
  aug_cmd->callback([&] { result = run_augment(aug); });

  RenderArgs ren;
  auto* ren_cmd = app.add_subcommand("render", "Render a heatmap or tensor to an 8-bit PGM");
  ren_cmd->add_option("--in", ren.in, "Heatmap (HMP1) or tensor (RST1)")->required();
  ren_cmd->add_option("--out", ren.out, "Output PGM path")->required();
  ren_cmd->callback([&] { result = run_render(ren); });

  struct Job {
    const char* name;
    const char* help;
    int (*run)(const JobArgs&);
  };
  const Job jobs[] = {
      {"pretrain", "Contrastive pretraining against the vision oracle", run_pretrain},
      {"probe", "Ridge probe on frozen backbone features", run_probe},
      {"sweep-labels", "Probe both arms at several label fractions", run_sweep},
      {"eval-det", "Rotated-box AP/mAP report", run_eval_det},
      {"retrieval", "Top-k embedding retrieval on held-out frames", run_retrieval},
  };
  std::vector<JobArgs> job_args(std::size(jobs));
  for (size_t i = 0; i < std::size(jobs); ++i) {
    auto* cmd = app.add_subcommand(jobs[i].name, jobs[i].help);
    cmd->add_option("--config", job_args[i].config, "Config JSON; relative paths resolve against its directory")
        ->required();
    cmd->add_option("--out", job_args[i].out, "Output directory")->required();
    cmd->callback([&, i] { result = jobs[i].run(job_args[i]); });
  }

  try {
    check_thread_env();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return result;
}
