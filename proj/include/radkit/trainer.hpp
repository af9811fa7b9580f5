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
#ifndef RADKIT_TRAINER_HPP_
#define RADKIT_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "radkit/augment.hpp"
#include "radkit/contrastive.hpp"
#include "radkit/encoder.hpp"
#include "radkit/radar_model.hpp"
#include "radkit/simulator.hpp"

namespace radkit {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Sample {
  Scene scene;
  VirtualArrayTensor tensor;
};

struct Dataset {
  ArrayGeometry geometry;
  PolarGrid grid;
  std::vector<Sample> samples;

  size_t size() const { return samples.size(); }
};

/// Generates `count` scenes and their tensors in memory, exactly as
/// `gen-scenes` followed by `simulate` would with the same seeds.
Dataset make_synthetic_dataset(size_t count, uint64_t scene_seed, uint64_t sim_seed, const SceneGenConfig& scenes = {},
                               const SimConfig& sim = {}, const ArrayGeometry& geometry = default_geometry(),
                               const PolarGrid& grid = default_grid());

/// RngStream used to synthesize scene `index` of a corpus.
RngStream simulation_stream(uint64_t sim_seed, size_t index);
RngStream scene_stream(uint64_t scene_seed);

/// Reads a directory written by `simulate`: manifest.json plus the scene
/// and tensor files it lists.
Dataset load_dataset(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Pretraining
// ---------------------------------------------------------------------------

enum class Schedule { kCosine, kConstant };

struct TrainConfig {
  size_t batch_size = 32;
  uint64_t steps = 500;
  double lr_base = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  Schedule schedule = Schedule::kCosine;
  uint64_t seed = 0;
  AugmentationSpec augmentation = AugmentationSpec::defaults();
  ContrastiveConfig contrastive;
  std::string dataset_path;
  uint64_t checkpoint_every = 0;  // 0 = final checkpoint only
  // Architecture and split.
  size_t embed_dim = 128;
  std::vector<size_t> backbone_hidden = {256};
  std::vector<size_t> head_hidden = {};  // empty = one hidden layer of embed_dim
  uint64_t oracle_seed = 7;
  size_t oracle_max_scatterers = 4;
  size_t holdout = 256;  // trailing frames excluded from pretraining

  void validate() const;
  EncoderShape encoder_shape(size_t input_dim) const;
};

/// Learning rate at a 0-based step: lr_base * (1 + cos(pi * step / steps)) / 2
/// for the cosine schedule.
double learning_rate(const TrainConfig& config, uint64_t step);

struct SgdState {
  GradientSet velocity;
};

/// v <- momentum * v + grad + weight_decay * param; param <- param - lr(step) * v.
/// Throws NumericalError if any updated parameter is non-finite.
EncoderParams sgd_step(const EncoderParams& params, const GradientSet& grads, SgdState& state, uint64_t step,
                       const TrainConfig& config);

struct StepLog {
  uint64_t step = 0;
  double l_intra = 0.0;
  double l_cross = 0.0;
  double l_total = 0.0;
  double lr = 0.0;
};

struct PretrainResult {
  EncoderParams initial;
  EncoderParams params;
  std::vector<StepLog> log;
  uint64_t steps = 0;
  size_t fallback_count = 0;  // zero-norm projections mapped to e1
  uint64_t teacher_hash_before = 0;
  uint64_t teacher_hash_after = 0;
};

struct PretrainHooks {
  std::function<void(const StepLog&)> on_step;
  std::function<void(const EncoderParams&, uint64_t step)> on_checkpoint;
};

/// Initial encoder for a config: the random-init arm of every comparison.
EncoderParams initial_params(const TrainConfig& config, size_t input_dim);

/// Teacher embeddings for every sample, rows in dataset order.
EmbeddingMatrix teacher_embeddings(const Dataset& dataset, const TrainConfig& config);
uint64_t hash_embeddings(const EmbeddingMatrix& m);

/// Self-supervised pretraining of the radar branch against the frozen
/// teacher. Bitwise deterministic for a fixed (config, dataset).
PretrainResult pretrain(const TrainConfig& config, const Dataset& dataset, const PretrainHooks& hooks = {});

/// Samples batch_size distinct indices in [0, pool) for a step.
std::vector<size_t> sample_batch(size_t pool, size_t batch_size, const RngStream& rng);

/// One batch's embeddings: views of each item encoded, plus the teacher.
struct BatchEmbeddings {
  EmbeddingBatch batch;
  ForwardCache<double> cache;  // rows 0..B-1 view a, B..2B-1 view b
};

BatchEmbeddings embed_batch(const EncoderParams& params, const Dataset& dataset, std::span<const size_t> indices,
                            const AugmentationSpec& spec, const RngStream& view_rng, const EmbeddingMatrix& teacher);

// ---------------------------------------------------------------------------
// Downstream probe
// ---------------------------------------------------------------------------

struct ProbeConfig {
  double ridge_lambda = 10.0;
  std::string label = "strongest_xy";
  double train_fraction = 1.0;
  size_t holdout = 256;
  uint64_t seed = 0;

  void validate() const;
};

struct ProbeReport {
  double rmse = 0.0;         // Euclidean position error, meters
  double rmse_x = 0.0;
  double rmse_y = 0.0;
  double target_std = 0.0;   // RMSE of predicting the training mean
  size_t n_train = 0;
  size_t n_test = 0;
};

/// Strongest-scatterer (x, y) target for a scene.
BevPoint strongest_xy(const Scene& scene);

/// Frozen backbone features (backbone_feat of the unaugmented heatmap),
/// samples x feature_dim.
EmbeddingMatrix backbone_features(const EncoderParams& params, const Dataset& dataset);

/// Closed-form ridge regression on standardized features, fit on the
/// training split and scored on the held-out split.
ProbeReport ridge_probe(const EmbeddingMatrix& features, const std::vector<BevPoint>& targets,
                        const ProbeConfig& config);
ProbeReport linear_probe(const EncoderParams& params, const Dataset& dataset, const ProbeConfig& config);

struct SweepRow {
  double fraction = 0.0;
  ProbeReport pretrained;
  ProbeReport random_init;
};

/// Probe at each training fraction for both arms. Throws DataError if a
/// fraction leaves fewer than 2 training samples.
std::vector<SweepRow> label_efficiency_sweep(const EncoderParams& pretrained, const EncoderParams& random_init,
                                             const Dataset& dataset, const std::vector<double>& fractions,
                                             const ProbeConfig& config);

/// Fractions of the label-efficiency table: 1, 3, 10, 30, 100 percent.
std::vector<double> default_label_fractions();

// ---------------------------------------------------------------------------
// Retrieval
// ---------------------------------------------------------------------------

struct RetrievalConfig {
  size_t holdout = 256;  // trailing frames used as the gallery
  size_t k = 1;
  uint64_t seed = 0;
  AugmentationSpec augmentation = AugmentationSpec::defaults();
  uint64_t oracle_seed = 7;
  size_t oracle_max_scatterers = 4;

  void validate() const;
};

struct RetrievalReport {
  double radar_radar = 0.0;   // view a -> view b, top-k
  double radar_vision = 0.0;  // unaugmented heatmap -> teacher, top-k
  double radar_vision_prototype = 0.0;  // mean of the two views -> teacher, top-k
  double chance = 0.0;        // k / n
  size_t n = 0;
  size_t k = 0;
};

/// Top-k retrieval on the trailing `holdout` frames with projected
/// embeddings. Views are drawn from stream (seed, frame index).
RetrievalReport evaluate_retrieval(const EncoderParams& params, const Dataset& dataset, const RetrievalConfig& config);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const ProbeConfig& c);
void from_json(const nlohmann::json& j, ProbeConfig& c);
void to_json(nlohmann::json& j, const StepLog& s);
void to_json(nlohmann::json& j, const ProbeReport& r);
void to_json(nlohmann::json& j, const RetrievalConfig& c);
void from_json(const nlohmann::json& j, RetrievalConfig& c);
void to_json(nlohmann::json& j, const RetrievalReport& r);

}  // namespace radkit

#endif  // RADKIT_TRAINER_HPP_
