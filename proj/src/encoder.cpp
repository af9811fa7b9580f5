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
#include "radkit/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "radkit/error.hpp"
#include "radkit/io.hpp"
#include "radkit/parallel.hpp"

namespace radkit {

// ---------------------------------------------------------------------------
// LayerStack
// ---------------------------------------------------------------------------

template <typename Real>
size_t LayerStack<Real>::num_params() const {
  size_t n = 0;
  for (size_t i = 0; i < num_layers(); ++i) n += layer(i).weight.size() + layer(i).bias.size();
  return n;
}

template <typename Real>
void LayerStack<Real>::for_each_tensor(const std::function<void(std::span<Real>)>& fn) {
  for (size_t i = 0; i < num_layers(); ++i) {
    fn(std::span<Real>(layer(i).weight));
    fn(std::span<Real>(layer(i).bias));
  }
}

template <typename Real>
void LayerStack<Real>::for_each_tensor(const std::function<void(std::span<const Real>)>& fn) const {
  for (size_t i = 0; i < num_layers(); ++i) {
    fn(std::span<const Real>(layer(i).weight));
    fn(std::span<const Real>(layer(i).bias));
  }
}

template <typename Real>
bool LayerStack<Real>::same_shape(const LayerStack& other) const {
  if (backbone.size() != other.backbone.size() || head.size() != other.head.size()) return false;
  for (size_t i = 0; i < num_layers(); ++i)
    if (layer(i).rows != other.layer(i).rows || layer(i).cols != other.layer(i).cols) return false;
  return true;
}

template <typename Real>
bool LayerStack<Real>::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::span<const Real> t) {
    ok = ok && std::all_of(t.begin(), t.end(), [](Real v) { return std::isfinite(v); });
  });
  return ok;
}

template <typename Real>
BasicGradientSet<Real> BasicGradientSet<Real>::zeros_like(const BasicEncoderParams<Real>& params) {
  BasicGradientSet<Real> g;
  for (const auto& l : params.backbone) g.backbone.emplace_back(l.rows, l.cols);
  for (const auto& l : params.head) g.head.emplace_back(l.rows, l.cols);
  return g;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

void EncoderShape::validate() const {
  if (backbone.size() < 2 || head.size() < 2)
    throw ConfigError("encoder: each stage needs at least an input and an output width");
  for (size_t w : backbone)
    if (w == 0) throw ConfigError("encoder: layer widths must be >= 1");
  for (size_t w : head)
    if (w == 0) throw ConfigError("encoder: layer widths must be >= 1");
  if (head.front() != backbone.back())
    throw ConfigError("encoder: head input width must equal backbone output width");
}

EncoderShape EncoderShape::defaults(size_t input_dim, size_t embed_dim) {
  return {{input_dim, 256, embed_dim}, {embed_dim, embed_dim, embed_dim}};
}

template <typename Real>
BasicEncoderParams<Real> init_params(const EncoderShape& shape, RngStream rng) {
  shape.validate();
  BasicEncoderParams<Real> p;
  auto build = [&](const std::vector<size_t>& widths, std::vector<DenseLayer<Real>>& out, uint64_t stage) {
    for (size_t i = 0; i + 1 < widths.size(); ++i) {
      DenseLayer<Real> layer(widths[i + 1], widths[i]);
      const double limit = std::sqrt(6.0 / static_cast<double>(widths[i] + widths[i + 1]));
      RngStream r = rng.split(stage * 1000 + i);
      for (auto& w : layer.weight) w = static_cast<Real>(r.uniform(-limit, limit));
      out.push_back(std::move(layer));
    }
  };
  build(shape.backbone, p.backbone, 0);
  build(shape.head, p.head, 1);
  return p;
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

namespace {

template <typename Real>
bool relu_after(const LayerStack<Real>& p, size_t i) {
  return i + 1 != p.backbone.size() && i + 1 != p.num_layers();
}

template <typename Real>
void dense_forward(const DenseLayer<Real>& layer, const Real* x, Real* y, bool relu) {
  for (size_t r = 0; r < layer.rows; ++r) {
    const Real* w = layer.weight.data() + r * layer.cols;
    Real acc = layer.bias[r];
    for (size_t c = 0; c < layer.cols; ++c) acc += w[c] * x[c];
    y[r] = (relu && acc < Real(0)) ? Real(0) : acc;
  }
}

template <typename Real>
void check_params(const BasicEncoderParams<Real>& p) {
  if (p.backbone.empty() || p.head.empty()) throw std::invalid_argument("encoder: empty network");
  for (size_t i = 1; i < p.num_layers(); ++i)
    if (p.layer(i).cols != p.layer(i - 1).rows) throw std::invalid_argument("encoder: layer widths do not chain");
}

}  // namespace

template <typename Real>
ForwardCache<Real> forward_batch(const BasicEncoderParams<Real>& params, std::span<const Real> inputs, size_t batch) {
  check_params(params);
  const size_t in_dim = params.input_dim();
  if (inputs.size() != batch * in_dim)
    throw std::invalid_argument("encoder: input size " + std::to_string(inputs.size()) + " != batch x " +
                                std::to_string(in_dim));
  const size_t n_layers = params.num_layers();
  const size_t embed = params.embed_dim();
  ForwardCache<Real> cache;
  cache.batch = batch;
  cache.acts.resize(n_layers + 1);
  cache.acts[0].assign(inputs.begin(), inputs.end());
  for (size_t i = 0; i < n_layers; ++i) cache.acts[i + 1].resize(batch * params.layer(i).rows);
  cache.norms.resize(batch);
  cache.projected.resize(batch * embed);

  const long long nb = static_cast<long long>(batch);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long bb = 0; bb < nb; ++bb) {
    const size_t b = static_cast<size_t>(bb);
    for (size_t i = 0; i < n_layers; ++i) {
      const auto& layer = params.layer(i);
      dense_forward(layer, cache.acts[i].data() + b * layer.cols, cache.acts[i + 1].data() + b * layer.rows,
                    relu_after(params, i));
    }
    const Real* y = cache.acts[n_layers].data() + b * embed;
    Real sq = 0;
    for (size_t d = 0; d < embed; ++d) sq += y[d] * y[d];
    const Real norm = std::sqrt(sq);
    cache.norms[b] = norm;
    Real* z = cache.projected.data() + b * embed;
    if (norm > Real(0)) {
      for (size_t d = 0; d < embed; ++d) z[d] = y[d] / norm;
    } else {
      std::fill(z, z + embed, Real(0));
      z[0] = Real(1);
    }
  }
  for (size_t b = 0; b < batch; ++b)
    if (!(cache.norms[b] > Real(0))) ++cache.fallback_count;
  const auto& feat = cache.acts[params.backbone.size()];
  cache.backbone_feat.assign(feat.begin(), feat.end());
  return cache;
}

template <typename Real>
BasicEncoderOutput<Real> forward(const BasicEncoderParams<Real>& params, std::span<const Real> input) {
  ForwardCache<Real> cache = forward_batch(params, input, 1);
  BasicEncoderOutput<Real> out;
  out.backbone_feat = std::move(cache.backbone_feat);
  out.projected = std::move(cache.projected);
  out.fallback = cache.fallback_count > 0;
  return out;
}

std::vector<double> stack_heatmaps(std::span<const Heatmap> heatmaps) {
  std::vector<double> out;
  if (heatmaps.empty()) return out;
  out.reserve(heatmaps.size() * heatmaps.front().size());
  for (const auto& h : heatmaps) {
    if (!h.same_shape(heatmaps.front())) throw std::invalid_argument("stack_heatmaps: mixed heatmap shapes");
    out.insert(out.end(), h.data.begin(), h.data.end());
  }
  return out;
}

BasicEncoderOutput<double> forward(const EncoderParams& params, const Heatmap& heatmap) {
  const std::vector<double> x(heatmap.data.begin(), heatmap.data.end());
  return forward<double>(params, std::span<const double>(x));
}

EmbeddingVec embed(const EncoderParams& params, const Heatmap& heatmap) {
  return {forward(params, heatmap).projected, true};
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

namespace {

// dL/dy for y -> y / ||y||: (g - z (z . g)) / ||y||, zero at the fallback.
template <typename Real>
void normalization_vjp(const Real* z, const Real* g, Real norm, size_t n, Real* out) {
  if (!(norm > Real(0))) {
    std::fill(out, out + n, Real(0));
    return;
  }
  Real zg = 0;
  for (size_t d = 0; d < n; ++d) zg += z[d] * g[d];
  for (size_t d = 0; d < n; ++d) out[d] = (g[d] - z[d] * zg) / norm;
}

// Propagates delta (layer i output) back to its input; applies the ReLU
// mask of the previous layer.
template <typename Real>
void propagate(const BasicEncoderParams<Real>& p, const ForwardCache<Real>& cache, size_t i, size_t b,
               const Real* delta, Real* dx) {
  const auto& layer = p.layer(i);
  std::fill(dx, dx + layer.cols, Real(0));
  for (size_t r = 0; r < layer.rows; ++r) {
    const Real d = delta[r];
    if (d == Real(0)) continue;
    const Real* w = layer.weight.data() + r * layer.cols;
    for (size_t c = 0; c < layer.cols; ++c) dx[c] += w[c] * d;
  }
  if (relu_after(p, i - 1)) {
    const Real* act = cache.acts[i].data() + b * layer.cols;
    for (size_t c = 0; c < layer.cols; ++c)
      if (!(act[c] > Real(0))) dx[c] = Real(0);
  }
}

template <typename Real>
void check_backward_inputs(const BasicEncoderParams<Real>& params, const ForwardCache<Real>& cache,
                           std::span<const Real> upstream) {
  check_params(params);
  if (upstream.size() != cache.batch * params.embed_dim())
    throw std::invalid_argument("backward: upstream gradient must be batch x embed_dim");
  if (cache.acts.size() != params.num_layers() + 1) throw std::invalid_argument("backward: cache/params mismatch");
}

template <typename Real>
void check_finite(const BasicGradientSet<Real>& g) {
  if (!g.all_finite()) throw NumericalError("backward: non-finite gradient");
}

}  // namespace

template <typename Real>
BasicGradientSet<Real> backward(const BasicEncoderParams<Real>& params, const ForwardCache<Real>& cache,
                                std::span<const Real> upstream) {
  check_backward_inputs(params, cache, upstream);
  const size_t n_layers = params.num_layers();
  const size_t batch = cache.batch;
  const size_t embed = params.embed_dim();

  // deltas[i] is dL/d(pre-activation output of layer i), batch x rows.
  std::vector<std::vector<Real>> deltas(n_layers);
  for (size_t i = 0; i < n_layers; ++i) deltas[i].resize(batch * params.layer(i).rows);

  const long long nb = static_cast<long long>(batch);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long bb = 0; bb < nb; ++bb) {
    const size_t b = static_cast<size_t>(bb);
    normalization_vjp(cache.projected.data() + b * embed, upstream.data() + b * embed, cache.norms[b], embed,
                      deltas[n_layers - 1].data() + b * embed);
    for (size_t i = n_layers - 1; i > 0; --i) {
      propagate(params, cache, i, b, deltas[i].data() + b * params.layer(i).rows,
                deltas[i - 1].data() + b * params.layer(i).cols);
    }
  }

  BasicGradientSet<Real> grads = BasicGradientSet<Real>::zeros_like(params);
  for (size_t i = 0; i < n_layers; ++i) {
    auto& g = grads.layer(i);
    const size_t cols = g.cols;
    const Real* act = cache.acts[i].data();
    const Real* delta = deltas[i].data();
    const long long rows = static_cast<long long>(g.rows);
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (long long rr = 0; rr < rows; ++rr) {
      const size_t r = static_cast<size_t>(rr);
      Real* gw = g.weight.data() + r * cols;
      for (size_t b = 0; b < batch; ++b) {
        const Real d = delta[b * g.rows + r];
        g.bias[r] += d;
        if (d == Real(0)) continue;
        const Real* x = act + b * cols;
        for (size_t c = 0; c < cols; ++c) gw[c] += d * x[c];
      }
    }
  }
  check_finite(grads);
  return grads;
}

namespace serial {

template <typename Real>
BasicGradientSet<Real> backward(const BasicEncoderParams<Real>& params, const ForwardCache<Real>& cache,
                                std::span<const Real> upstream) {
  check_backward_inputs(params, cache, upstream);
  const size_t n_layers = params.num_layers();
  const size_t embed = params.embed_dim();
  BasicGradientSet<Real> grads = BasicGradientSet<Real>::zeros_like(params);
  std::vector<Real> delta, dx;
  for (size_t b = 0; b < cache.batch; ++b) {
    delta.assign(embed, Real(0));
    normalization_vjp(cache.projected.data() + b * embed, upstream.data() + b * embed, cache.norms[b], embed,
                      delta.data());
    for (size_t i = n_layers; i-- > 0;) {
      auto& g = grads.layer(i);
      const Real* x = cache.acts[i].data() + b * g.cols;
      for (size_t r = 0; r < g.rows; ++r) {
        g.bias[r] += delta[r];
        if (delta[r] == Real(0)) continue;
        for (size_t c = 0; c < g.cols; ++c) g.weight[r * g.cols + c] += delta[r] * x[c];
      }
      if (i == 0) break;
      dx.assign(g.cols, Real(0));
      propagate(params, cache, i, b, delta.data(), dx.data());
      delta.swap(dx);
    }
  }
  check_finite(grads);
  return grads;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// Vision oracle
// ---------------------------------------------------------------------------

namespace {
constexpr uint64_t kOracleStream = 0x5EED0A11CEull;
}

VisionOracle::VisionOracle(uint64_t oracle_seed, VisionOracleConfig config) : config_(config) {
  if (config_.embed_dim == 0 || config_.max_scatterers == 0)
    throw ConfigError("vision oracle: embed_dim and max_scatterers must be >= 1");
  const size_t features = 3 * config_.max_scatterers;
  RngStream rng(oracle_seed, kOracleStream);
  matrix_.resize(config_.embed_dim * features);
  const double scale = 1.0 / std::sqrt(static_cast<double>(features));
  for (auto& m : matrix_) m = scale * rng.normal();
}

std::vector<double> VisionOracle::scene_features(const Scene& scene) const {
  std::vector<Scatterer> sorted = scene.scatterers;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Scatterer& a, const Scatterer& b) {
    return a.range < b.range || (a.range == b.range && a.azimuth < b.azimuth);
  });
  std::vector<double> f(3 * config_.max_scatterers, 0.0);
  for (size_t s = 0; s < std::min(sorted.size(), config_.max_scatterers); ++s) {
    const BevPoint p = polar_to_cartesian(sorted[s].range, sorted[s].azimuth);
    f[3 * s] = p.x;
    f[3 * s + 1] = p.y;
    f[3 * s + 2] = sorted[s].amplitude;
  }
  return f;
}

EmbeddingVec VisionOracle::operator()(const Scene& scene) const {
  EmbeddingVec out;
  out.normalized = true;
  out.values.assign(config_.embed_dim, 0.0);
  const std::vector<double> f = scene_features(scene);
  double sq = 0.0;
  for (size_t r = 0; r < config_.embed_dim; ++r) {
    double acc = 0.0;
    for (size_t c = 0; c < f.size(); ++c) acc += matrix_[r * f.size() + c] * f[c];
    out.values[r] = acc;
    sq += acc * acc;
  }
  if (scene.scatterers.empty() || !(sq > 0.0)) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.values[0] = 1.0;
    return out;
  }
  const double norm = std::sqrt(sq);
  for (auto& v : out.values) v /= norm;
  return out;
}

EmbeddingVec vision_oracle(const Scene& scene, uint64_t oracle_seed, VisionOracleConfig config) {
  return VisionOracle(oracle_seed, config)(scene);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kCheckpointMagic = "CKP1";

void encode_stage(ByteWriter& w, const std::vector<DenseLayer<double>>& layers) {
  w.u32(static_cast<uint32_t>(layers.size()));
  for (const auto& l : layers) {
    w.u32(static_cast<uint32_t>(l.rows));
    w.u32(static_cast<uint32_t>(l.cols));
    for (double v : l.weight) w.f32(static_cast<float>(v));
    for (double v : l.bias) w.f32(static_cast<float>(v));
  }
}

std::vector<DenseLayer<double>> decode_stage(ByteReader& r) {
  const uint32_t count = r.u32();
  std::vector<DenseLayer<double>> layers;
  for (uint32_t i = 0; i < count; ++i) {
    const uint64_t at = r.offset();
    const uint64_t rows = r.u32();
    const uint64_t cols = r.u32();
    if (rows == 0 || cols == 0) throw FormatError("checkpoint: zero-sized layer", at);
    const uint64_t n = rows * cols;  // < 2^64 since both < 2^32
    if (n > (uint64_t(1) << 40)) throw DimensionError("checkpoint: layer too large", at);
    r.require((n + rows) * 4);
    DenseLayer<double> l(rows, cols);
    for (auto& v : l.weight) v = r.f32();
    for (auto& v : l.bias) v = r.f32();
    layers.push_back(std::move(l));
  }
  return layers;
}

}  // namespace

std::vector<uint8_t> encode_checkpoint(const EncoderParams& params, uint64_t step) {
  ByteWriter w;
  w.magic(kCheckpointMagic);
  encode_stage(w, params.backbone);
  encode_stage(w, params.head);
  w.u64(step);
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kCheckpointMagic);
  Checkpoint ck;
  ck.params.backbone = decode_stage(r);
  ck.params.head = decode_stage(r);
  ck.step = r.u64();
  r.expect_end();
  for (size_t i = 1; i < ck.params.num_layers(); ++i)
    if (ck.params.layer(i).cols != ck.params.layer(i - 1).rows)
      throw FormatError("checkpoint: layer widths do not chain", 4);
  return ck;
}

void write_checkpoint(const EncoderParams& params, uint64_t step, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(params, step));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

EncoderParams round_to_checkpoint(const EncoderParams& params) {
  EncoderParams out = params;
  out.for_each_tensor([](std::span<double> t) {
    for (auto& v : t) v = static_cast<double>(static_cast<float>(v));
  });
  return out;
}

uint64_t fnv1a64(std::span<const uint8_t> bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Instantiations: double for training, float for the single-precision
// gradient checks.
template struct LayerStack<float>;
template struct LayerStack<double>;
template struct BasicGradientSet<float>;
template struct BasicGradientSet<double>;
template BasicEncoderParams<float> init_params<float>(const EncoderShape&, RngStream);
template BasicEncoderParams<double> init_params<double>(const EncoderShape&, RngStream);
template ForwardCache<float> forward_batch<float>(const BasicEncoderParams<float>&, std::span<const float>, size_t);
template ForwardCache<double> forward_batch<double>(const BasicEncoderParams<double>&, std::span<const double>, size_t);
template BasicEncoderOutput<float> forward<float>(const BasicEncoderParams<float>&, std::span<const float>);
template BasicEncoderOutput<double> forward<double>(const BasicEncoderParams<double>&, std::span<const double>);
template BasicGradientSet<float> backward<float>(const BasicEncoderParams<float>&, const ForwardCache<float>&,
                                                 std::span<const float>);
template BasicGradientSet<double> backward<double>(const BasicEncoderParams<double>&, const ForwardCache<double>&,
                                                   std::span<const double>);
template BasicGradientSet<float> serial::backward<float>(const BasicEncoderParams<float>&, const ForwardCache<float>&,
                                                         std::span<const float>);
template BasicGradientSet<double> serial::backward<double>(const BasicEncoderParams<double>&,
                                                           const ForwardCache<double>&, std::span<const double>);

}  // namespace radkit
