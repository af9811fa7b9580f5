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
#include "radkit/trainer.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "radkit/error.hpp"
#include "radkit/io.hpp"
#include "radkit/parallel.hpp"

namespace radkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream tags. Every stochastic stage draws from its own stream so that
// changing one stage never shifts another's draws.
constexpr uint64_t kSceneStream = 0x5CE7E;
constexpr uint64_t kSimStream = 0x5171;
constexpr uint64_t kInitStream = 0x1417;
constexpr uint64_t kBatchStream = 0xBA7C;
constexpr uint64_t kViewStream = 0x7E35;

}  // namespace

RngStream scene_stream(uint64_t scene_seed) { return {scene_seed, kSceneStream}; }

RngStream simulation_stream(uint64_t sim_seed, size_t index) { return RngStream(sim_seed, kSimStream).split(index); }

Dataset make_synthetic_dataset(size_t count, uint64_t scene_seed, uint64_t sim_seed, const SceneGenConfig& scenes,
                               const SimConfig& sim, const ArrayGeometry& geometry, const PolarGrid& grid) {
  Dataset ds;
  ds.geometry = geometry;
  ds.grid = grid;
  ds.samples.resize(count);
  const RngStream scene_rng = scene_stream(scene_seed);
  for (size_t i = 0; i < count; ++i) ds.samples[i].scene = generate_scene(i, grid, scenes, scene_rng);
  for (size_t i = 0; i < count; ++i)
    ds.samples[i].tensor = synthesize_tensor(ds.samples[i].scene, geometry, grid, sim, simulation_stream(sim_seed, i));
  return ds;
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw DataError("dataset: missing " + manifest_path.string());
  const json manifest = read_json_file(manifest_path);
  Dataset ds;
  try {
    manifest.at("geometry").get_to(ds.geometry);
    manifest.at("grid").get_to(ds.grid);
    ds.geometry.validate();
    ds.grid.validate();
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> files;
  try {
    for (const json& entry : manifest.at("entries"))
      files.emplace_back(entry.at("scene").get<std::string>(), entry.at("tensor").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  for (const auto& [scene_file, tensor_file] : files) {
    Sample s;
    s.scene = read_scene(dir / scene_file);
    s.tensor = read_tensor(dir / tensor_file);
    if (s.tensor.num_virtual != ds.geometry.num_virtual() || s.tensor.num_range != ds.grid.num_range ||
        s.tensor.num_azimuth != ds.grid.num_azimuth)
      throw DataError("dataset: tensor for '" + s.scene.id + "' does not match the manifest geometry/grid");
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(lr_base > 0.0)) throw ConfigError("train: lr_base must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be >= 0");
  if (embed_dim < 1) throw ConfigError("train: embed_dim must be >= 1");
  augmentation.validate();
  contrastive.validate();
}

EncoderShape TrainConfig::encoder_shape(size_t input_dim) const {
  EncoderShape shape;
  shape.backbone.push_back(input_dim);
  shape.backbone.insert(shape.backbone.end(), backbone_hidden.begin(), backbone_hidden.end());
  shape.backbone.push_back(embed_dim);
  shape.head.push_back(embed_dim);
  if (head_hidden.empty())
    shape.head.push_back(embed_dim);
  else
    shape.head.insert(shape.head.end(), head_hidden.begin(), head_hidden.end());
  shape.head.push_back(embed_dim);
  return shape;
}

double learning_rate(const TrainConfig& config, uint64_t step) {
  if (config.schedule == Schedule::kConstant || config.steps == 0) return config.lr_base;
  const double t = static_cast<double>(step) / static_cast<double>(config.steps);
  return config.lr_base * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

EncoderParams sgd_step(const EncoderParams& params, const GradientSet& grads, SgdState& state, uint64_t step,
                       const TrainConfig& config) {
  if (!params.same_shape(grads)) throw std::invalid_argument("sgd_step: gradient shape mismatch");
  if (!state.velocity.same_shape(params)) state.velocity = GradientSet::zeros_like(params);
  const double lr = learning_rate(config, step);
  EncoderParams next = params;
  for (size_t i = 0; i < params.num_layers(); ++i) {
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& v) {
      for (size_t n = 0; n < p.size(); ++n) {
        v[n] = config.momentum * v[n] + g[n] + config.weight_decay * p[n];
        p[n] -= lr * v[n];
      }
    };
    update(next.layer(i).weight, grads.layer(i).weight, state.velocity.layer(i).weight);
    update(next.layer(i).bias, grads.layer(i).bias, state.velocity.layer(i).bias);
  }
  if (!next.all_finite()) throw NumericalError("sgd_step: non-finite parameter after step " + std::to_string(step));
  return next;
}

// ---------------------------------------------------------------------------
// Pretraining
// ---------------------------------------------------------------------------

EncoderParams initial_params(const TrainConfig& config, size_t input_dim) {
  return init_params<double>(config.encoder_shape(input_dim), RngStream(config.seed, kInitStream));
}

EmbeddingMatrix teacher_embeddings(const Dataset& dataset, const TrainConfig& config) {
  const VisionOracle oracle(config.oracle_seed, {config.embed_dim, config.oracle_max_scatterers});
  EmbeddingMatrix out(dataset.size(), config.embed_dim);
  for (size_t i = 0; i < dataset.size(); ++i) {
    const EmbeddingVec e = oracle(dataset.samples[i].scene);
    std::copy(e.values.begin(), e.values.end(), out.row(i).begin());
  }
  return out;
}

uint64_t hash_embeddings(const EmbeddingMatrix& m) {
  std::vector<uint8_t> bytes;
  bytes.reserve(m.data.size() * 8);
  for (double v : m.data) {
    const auto bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<uint8_t>(bits >> (8 * i)));
  }
  return fnv1a64(bytes);
}

std::vector<size_t> sample_batch(size_t pool, size_t batch_size, const RngStream& rng) {
  if (pool == 0) throw DataError("sample_batch: empty pool");
  const size_t b = std::min(pool, batch_size);
  RngStream r = rng;
  std::vector<size_t> perm(pool);
  std::iota(perm.begin(), perm.end(), size_t{0});
  for (size_t i = 0; i < b; ++i) {
    const size_t j = i + static_cast<size_t>(r.below(pool - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(b);
  return perm;
}

BatchEmbeddings embed_batch(const EncoderParams& params, const Dataset& dataset, std::span<const size_t> indices,
                            const AugmentationSpec& spec, const RngStream& view_rng, const EmbeddingMatrix& teacher) {
  const size_t b = indices.size();
  std::vector<Heatmap> views(2 * b);
  const long long nb = static_cast<long long>(b);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long ii = 0; ii < nb; ++ii) {
    const size_t i = static_cast<size_t>(ii);
    ViewPair pair = make_views(dataset.samples[indices[i]].tensor, spec, view_rng.split(i));
    views[i] = std::move(pair.view_a);
    views[b + i] = std::move(pair.view_b);
  }
  const std::vector<double> inputs = stack_heatmaps(views);

  BatchEmbeddings out;
  out.cache = forward_batch<double>(params, inputs, 2 * b);
  const size_t dim = params.embed_dim();
  const auto& proj = out.cache.projected;
  out.batch.z = EmbeddingMatrix(b, dim, std::vector<double>(proj.begin(), proj.begin() + static_cast<long>(b * dim)));
  out.batch.z_prime = EmbeddingMatrix(b, dim, std::vector<double>(proj.begin() + static_cast<long>(b * dim), proj.end()));
  if (teacher.rows > 0) {
    if (teacher.cols != dim) throw std::invalid_argument("embed_batch: teacher dim != embed_dim");
    EmbeddingMatrix v(b, dim);
    for (size_t i = 0; i < b; ++i) std::copy(teacher.row(indices[i]).begin(), teacher.row(indices[i]).end(), v.row(i).begin());
    out.batch.z_vision = std::move(v);
  }
  return out;
}

PretrainResult pretrain(const TrainConfig& config, const Dataset& dataset, const PretrainHooks& hooks) {
  config.validate();
  if (dataset.size() == 0) throw DataError("pretrain: dataset is empty");
  if (config.holdout >= dataset.size())
    throw DataError("pretrain: holdout (" + std::to_string(config.holdout) + ") leaves no training frames");
  const size_t pool = dataset.size() - config.holdout;
  const size_t input_dim = static_cast<size_t>(dataset.grid.num_range) * dataset.grid.num_azimuth;
  for (const auto& s : dataset.samples)
    if (s.tensor.slab_size() != input_dim) throw DataError("pretrain: tensor '" + s.scene.id + "' has the wrong grid");

  PretrainResult result;
  result.initial = initial_params(config, input_dim);
  EncoderParams params = result.initial;
  const EmbeddingMatrix teacher = teacher_embeddings(dataset, config);
  result.teacher_hash_before = hash_embeddings(teacher);

  SgdState state;
  const RngStream batch_rng(config.seed, kBatchStream);
  const RngStream view_rng(config.seed, kViewStream);
  for (uint64_t step = 0; step < config.steps; ++step) {
    const std::vector<size_t> indices = sample_batch(pool, config.batch_size, batch_rng.split(step));
    BatchEmbeddings be = embed_batch(params, dataset, indices, config.augmentation, view_rng.split(step), teacher);
    result.fallback_count += be.cache.fallback_count;

    const LossGradients lg = loss_gradients(be.batch, config.contrastive);
    if (!std::isfinite(lg.loss.total))
      throw NumericalError("pretrain: non-finite loss at step " + std::to_string(step));
    std::vector<double> upstream = lg.d_z.data;
    upstream.insert(upstream.end(), lg.d_z_prime.data.begin(), lg.d_z_prime.data.end());
    const GradientSet grads = backward<double>(params, be.cache, upstream);

    StepLog entry{step, lg.loss.intra, lg.loss.cross, lg.loss.total, learning_rate(config, step)};
    params = sgd_step(params, grads, state, step, config);
    result.log.push_back(entry);
    if (hooks.on_step) hooks.on_step(entry);
    if (hooks.on_checkpoint && config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0)
      hooks.on_checkpoint(params, step + 1);
  }
  result.params = std::move(params);
  result.steps = config.steps;
  result.teacher_hash_after = hash_embeddings(teacher_embeddings(dataset, config));
  return result;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(json& j, const TrainConfig& c) {
  j = json{{"batch_size", c.batch_size},
           {"steps", c.steps},
           {"lr_base", c.lr_base},
           {"momentum", c.momentum},
           {"weight_decay", c.weight_decay},
           {"schedule", c.schedule == Schedule::kCosine ? "cosine" : "constant"},
           {"seed", c.seed},
           {"augmentation", c.augmentation},
           {"contrastive", c.contrastive},
           {"dataset_path", c.dataset_path},
           {"checkpoint_every", c.checkpoint_every},
           {"embed_dim", c.embed_dim},
           {"backbone_hidden", c.backbone_hidden},
           {"head_hidden", c.head_hidden},
           {"oracle_seed", c.oracle_seed},
           {"oracle_max_scatterers", c.oracle_max_scatterers},
           {"holdout", c.holdout}};
}

void from_json(const json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.lr_base = j.value("lr_base", c.lr_base);
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  const std::string schedule = j.value("schedule", std::string("cosine"));
  if (schedule == "cosine")
    c.schedule = Schedule::kCosine;
  else if (schedule == "constant")
    c.schedule = Schedule::kConstant;
  else
    throw ConfigError("train: schedule must be cosine or constant");
  c.seed = j.value("seed", c.seed);
  if (j.contains("augmentation")) j.at("augmentation").get_to(c.augmentation);
  if (j.contains("contrastive")) j.at("contrastive").get_to(c.contrastive);
  c.dataset_path = j.value("dataset_path", c.dataset_path);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.backbone_hidden = j.value("backbone_hidden", c.backbone_hidden);
  c.head_hidden = j.value("head_hidden", c.head_hidden);
  c.oracle_seed = j.value("oracle_seed", c.oracle_seed);
  c.oracle_max_scatterers = j.value("oracle_max_scatterers", c.oracle_max_scatterers);
  c.holdout = j.value("holdout", c.holdout);
}

void to_json(json& j, const StepLog& s) {
  j = json{{"step", s.step}, {"l_intra", s.l_intra}, {"l_cross", s.l_cross}, {"l_total", s.l_total}, {"lr", s.lr}};
}

}  // namespace radkit
