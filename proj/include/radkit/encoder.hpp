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
#ifndef RADKIT_ENCODER_HPP_
#define RADKIT_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "radkit/radar_model.hpp"
#include "radkit/rng.hpp"

namespace radkit {

/// Dense layer y = W x + b, W row-major (rows = outputs, cols = inputs).
template <typename Real>
struct DenseLayer {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<Real> weight;
  std::vector<Real> bias;

  DenseLayer() = default;
  DenseLayer(size_t out, size_t in) : rows(out), cols(in), weight(out * in, Real(0)), bias(out, Real(0)) {}
  Real& w(size_t r, size_t c) { return weight[r * cols + c]; }
  Real w(size_t r, size_t c) const { return weight[r * cols + c]; }
};

/// Backbone f and projection head g, each a chain of dense layers with a
/// rectifier between layers and none after the last layer of a stage.
template <typename Real>
struct LayerStack {
  std::vector<DenseLayer<Real>> backbone;
  std::vector<DenseLayer<Real>> head;

  size_t input_dim() const { return backbone.empty() ? 0 : backbone.front().cols; }
  size_t feature_dim() const { return backbone.empty() ? 0 : backbone.back().rows; }
  size_t embed_dim() const { return head.empty() ? 0 : head.back().rows; }
  size_t num_layers() const { return backbone.size() + head.size(); }
  DenseLayer<Real>& layer(size_t i) { return i < backbone.size() ? backbone[i] : head[i - backbone.size()]; }
  const DenseLayer<Real>& layer(size_t i) const {
    return i < backbone.size() ? backbone[i] : head[i - backbone.size()];
  }
  size_t num_params() const;
  /// Visits every parameter tensor (weights then bias, layer by layer).
  void for_each_tensor(const std::function<void(std::span<Real>)>& fn);
  void for_each_tensor(const std::function<void(std::span<const Real>)>& fn) const;
  bool same_shape(const LayerStack& other) const;
  bool all_finite() const;
};

template <typename Real>
struct BasicEncoderParams : LayerStack<Real> {};

/// Gradient of a scalar loss wrt every encoder parameter, shape-matched.
template <typename Real>
struct BasicGradientSet : LayerStack<Real> {
  static BasicGradientSet zeros_like(const BasicEncoderParams<Real>& params);
};

using EncoderParams = BasicEncoderParams<double>;
using GradientSet = BasicGradientSet<double>;

/// Layer widths, input first. backbone.front() must be L*A and
/// head.front() must equal backbone.back().
struct EncoderShape {
  std::vector<size_t> backbone;
  std::vector<size_t> head;

  void validate() const;
  /// L*A -> 256 -> embed_dim backbone, embed_dim -> embed_dim -> embed_dim head.
  static EncoderShape defaults(size_t input_dim, size_t embed_dim = 128);
};

/// Glorot-uniform weights, zero biases.
template <typename Real>
BasicEncoderParams<Real> init_params(const EncoderShape& shape, RngStream rng);

struct EmbeddingVec {
  std::vector<double> values;
  bool normalized = false;
};

template <typename Real>
struct BasicEncoderOutput {
  std::vector<Real> backbone_feat;
  std::vector<Real> projected;  // unit norm
  bool fallback = false;        // pre-norm output was zero; projected = e1
};

template <typename Real>
BasicEncoderOutput<Real> forward(const BasicEncoderParams<Real>& params, std::span<const Real> input);

/// Forward on a heatmap (flattened range-major).
BasicEncoderOutput<double> forward(const EncoderParams& params, const Heatmap& heatmap);
EmbeddingVec embed(const EncoderParams& params, const Heatmap& heatmap);

/// Activations kept for the reverse pass of a batch.
template <typename Real>
struct ForwardCache {
  size_t batch = 0;
  // acts[i] holds the input to layer i for every sample (batch x cols);
  // acts[num_layers] holds the pre-normalization output.
  std::vector<std::vector<Real>> acts;
  std::vector<Real> norms;           // per sample ||y||
  std::vector<Real> projected;       // batch x embed_dim
  std::vector<Real> backbone_feat;   // batch x feature_dim
  size_t fallback_count = 0;
};

/// Batched forward. inputs is batch x input_dim, row-major. Parallel over
/// samples.
template <typename Real>
ForwardCache<Real> forward_batch(const BasicEncoderParams<Real>& params, std::span<const Real> inputs, size_t batch);

/// Exact reverse-mode gradient of sum_b <upstream_b, z_b> where z_b is the
/// normalized projection of sample b. upstream is batch x embed_dim.
/// Throws NumericalError on a non-finite gradient. Parallel over samples
/// for the deltas and over output rows for the weight gradients; the batch
/// sum always runs in sample order, so results are bit-identical for any
/// worker count.
template <typename Real>
BasicGradientSet<Real> backward(const BasicEncoderParams<Real>& params, const ForwardCache<Real>& cache,
                                std::span<const Real> upstream);

namespace serial {

/// Per-sample backprop accumulated in sample order. Reference for backward().
template <typename Real>
BasicGradientSet<Real> backward(const BasicEncoderParams<Real>& params, const ForwardCache<Real>& cache,
                                std::span<const Real> upstream);

}  // namespace serial

/// Flattens heatmaps into a batch x (L*A) input matrix.
std::vector<double> stack_heatmaps(std::span<const Heatmap> heatmaps);

// ---------------------------------------------------------------------------
// Frozen teacher standing in for a pretrained vision backbone.
// ---------------------------------------------------------------------------

struct VisionOracleConfig {
  size_t embed_dim = 128;
  size_t max_scatterers = 4;
};

/// Deterministic scene embedding: scatterers sorted by (range, azimuth)
/// contribute (x, y, amplitude), zero-padded or truncated to max_scatterers,
/// projected by a fixed Gaussian matrix drawn from the seed and
/// l2-normalized. Empty scenes map to e1.
class VisionOracle {
 public:
  explicit VisionOracle(uint64_t oracle_seed, VisionOracleConfig config = {});
  EmbeddingVec operator()(const Scene& scene) const;
  std::vector<double> scene_features(const Scene& scene) const;
  const VisionOracleConfig& config() const { return config_; }

 private:
  VisionOracleConfig config_;
  std::vector<double> matrix_;  // embed_dim x (3 * max_scatterers)
};

EmbeddingVec vision_oracle(const Scene& scene, uint64_t oracle_seed, VisionOracleConfig config = {});

// ---------------------------------------------------------------------------
// Checkpoint: "CKP1", u32 backbone layer count, per layer u32 rows, u32 cols,
// rows*cols f32 weights (row-major) then rows f32 biases; the head follows
// with the same scheme (count then layers); trailing u64 training step.
// ---------------------------------------------------------------------------

struct Checkpoint {
  EncoderParams params;
  uint64_t step = 0;
};

std::vector<uint8_t> encode_checkpoint(const EncoderParams& params, uint64_t step);
Checkpoint decode_checkpoint(std::span<const uint8_t> bytes);
void write_checkpoint(const EncoderParams& params, uint64_t step, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);
/// Parameters as stored on disk (rounded through f32).
EncoderParams round_to_checkpoint(const EncoderParams& params);

/// FNV-1a over a byte buffer; used for checkpoint and teacher hashes.
uint64_t fnv1a64(std::span<const uint8_t> bytes);

}  // namespace radkit

#endif  // RADKIT_ENCODER_HPP_
