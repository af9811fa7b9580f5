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
#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "radkit/error.hpp"
#include "radkit/eval.hpp"
#include "radkit/parallel.hpp"
#include "radkit/trainer.hpp"

namespace radkit {

using nlohmann::json;

namespace {
constexpr uint64_t kProbeStream = 0x960BE;
constexpr size_t kFeatureChunk = 256;
constexpr uint64_t kRetrievalStream = 0x4E7E1;
}  // namespace

void ProbeConfig::validate() const {
  if (!(ridge_lambda >= 0.0)) throw ConfigError("probe: ridge_lambda must be >= 0");
  if (label != "strongest_xy") throw ConfigError("probe: label must be strongest_xy");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("probe: train_fraction must be in (0, 1]");
}

BevPoint strongest_xy(const Scene& scene) {
  if (scene.scatterers.empty()) throw DataError("probe: scene '" + scene.id + "' has no scatterers to label");
  size_t best = 0;
  for (size_t s = 1; s < scene.scatterers.size(); ++s)
    if (scene.scatterers[s].amplitude > scene.scatterers[best].amplitude) best = s;
  return polar_to_cartesian(scene.scatterers[best].range, scene.scatterers[best].azimuth);
}

EmbeddingMatrix backbone_features(const EncoderParams& params, const Dataset& dataset) {
  const size_t n = dataset.size();
  const size_t dim = params.feature_dim();
  EmbeddingMatrix out(n, dim);
  std::vector<Heatmap> maps(n);
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long i = 0; i < nn; ++i) maps[static_cast<size_t>(i)] = integrate_heatmap(dataset.samples[static_cast<size_t>(i)].tensor);
  for (size_t start = 0; start < n; start += kFeatureChunk) {
    const size_t count = std::min(kFeatureChunk, n - start);
    const std::vector<double> inputs = stack_heatmaps(std::span<const Heatmap>(maps.data() + start, count));
    const ForwardCache<double> cache = forward_batch<double>(params, inputs, count);
    std::copy(cache.backbone_feat.begin(), cache.backbone_feat.end(), out.data.begin() + static_cast<long>(start * dim));
  }
  return out;
}

ProbeReport ridge_probe(const EmbeddingMatrix& features, const std::vector<BevPoint>& targets, const ProbeConfig& config) {
  config.validate();
  const size_t n = features.rows;
  if (targets.size() != n) throw std::invalid_argument("probe: feature/target count mismatch");
  if (config.holdout >= n) throw DataError("probe: holdout leaves no training samples");
  const size_t pool = n - config.holdout;
  const auto n_train = static_cast<size_t>(std::ceil(config.train_fraction * static_cast<double>(pool) - 1e-9));
  if (n_train < 2)
    throw DataError("probe: train_fraction " + std::to_string(config.train_fraction) + " yields fewer than 2 samples");

  // Deterministic subset of the training pool.
  std::vector<size_t> order(pool);
  std::iota(order.begin(), order.end(), size_t{0});
  RngStream rng(config.seed, kProbeStream);
  for (size_t i = pool; i > 1; --i) std::swap(order[i - 1], order[static_cast<size_t>(rng.below(i))]);
  order.resize(n_train);

  const auto f = static_cast<Eigen::Index>(features.cols);
  const auto nt = static_cast<Eigen::Index>(n_train);
  Eigen::MatrixXd x(nt, f);
  Eigen::MatrixXd y(nt, 2);
  for (Eigen::Index r = 0; r < nt; ++r) {
    const size_t idx = order[static_cast<size_t>(r)];
    for (Eigen::Index c = 0; c < f; ++c) x(r, c) = features.row(idx)[static_cast<size_t>(c)];
    y(r, 0) = targets[idx].x;
    y(r, 1) = targets[idx].y;
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd scale(f);
  for (Eigen::Index c = 0; c < f; ++c) {
    const double var = (x.col(c).array() - mean(c)).square().mean();
    scale(c) = var > 1e-24 ? 1.0 / std::sqrt(var) : 0.0;
  }
  x = ((x.rowwise() - mean).array().rowwise() * scale.array()).matrix();
  const Eigen::RowVector2d y_mean = y.colwise().mean();
  y = y.rowwise() - y_mean;

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += config.ridge_lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("probe: feature covariance factorization failed");
  if (config.ridge_lambda == 0.0) {
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff()))
      throw NumericalError("probe: singular feature covariance; set ridge_lambda > 0");
  }
  const Eigen::MatrixXd w = ldlt.solve(x.transpose() * y);

  ProbeReport rep;
  rep.n_train = n_train;
  rep.n_test = config.holdout;
  double se = 0.0, se_x = 0.0, se_y = 0.0, base = 0.0;
  Eigen::RowVectorXd row(f);
  for (size_t i = pool; i < n; ++i) {
    for (Eigen::Index c = 0; c < f; ++c) row(c) = (features.row(i)[static_cast<size_t>(c)] - mean(c)) * scale(c);
    const Eigen::RowVector2d pred = row * w + y_mean;
    const double dx = pred(0) - targets[i].x;
    const double dy = pred(1) - targets[i].y;
    se_x += dx * dx;
    se_y += dy * dy;
    se += dx * dx + dy * dy;
    const double bx = y_mean(0) - targets[i].x;
    const double by = y_mean(1) - targets[i].y;
    base += bx * bx + by * by;
  }
  const double m = static_cast<double>(config.holdout);
  rep.rmse = std::sqrt(se / m);
  rep.rmse_x = std::sqrt(se_x / m);
  rep.rmse_y = std::sqrt(se_y / m);
  rep.target_std = std::sqrt(base / m);
  return rep;
}

ProbeReport linear_probe(const EncoderParams& params, const Dataset& dataset, const ProbeConfig& config) {
  config.validate();
  std::vector<BevPoint> targets;
  targets.reserve(dataset.size());
  for (const auto& s : dataset.samples) targets.push_back(strongest_xy(s.scene));
  return ridge_probe(backbone_features(params, dataset), targets, config);
}

std::vector<double> default_label_fractions() { return {0.01, 0.03, 0.10, 0.30, 1.0}; }

std::vector<SweepRow> label_efficiency_sweep(const EncoderParams& pretrained, const EncoderParams& random_init,
                                             const Dataset& dataset, const std::vector<double>& fractions,
                                             const ProbeConfig& config) {
  config.validate();
  if (dataset.size() == 0) throw DataError("sweep: labeled set is empty");
  std::vector<BevPoint> targets;
  for (const auto& s : dataset.samples) targets.push_back(strongest_xy(s.scene));
  const EmbeddingMatrix feat_pre = backbone_features(pretrained, dataset);
  const EmbeddingMatrix feat_rand = backbone_features(random_init, dataset);
  std::vector<SweepRow> rows;
  for (double fraction : fractions) {
    ProbeConfig c = config;
    c.train_fraction = fraction;
    rows.push_back({fraction, ridge_probe(feat_pre, targets, c), ridge_probe(feat_rand, targets, c)});
  }
  return rows;
}

void RetrievalConfig::validate() const {
  if (k < 1) throw ConfigError("retrieval: k must be >= 1");
  if (holdout < 1) throw ConfigError("retrieval: holdout must be >= 1");
  if (k > holdout) throw ConfigError("retrieval: k exceeds the gallery size");
  augmentation.validate();
}

RetrievalReport evaluate_retrieval(const EncoderParams& params, const Dataset& dataset, const RetrievalConfig& config) {
  config.validate();
  const size_t n = config.holdout;
  if (n > dataset.size())
    throw DataError("retrieval: holdout " + std::to_string(n) + " exceeds dataset size " +
                    std::to_string(dataset.size()));
  const size_t first = dataset.size() - n;
  const size_t dim = params.embed_dim();
  const VisionOracle oracle(config.oracle_seed, {dim, config.oracle_max_scatterers});
  const RngStream rng(config.seed, kRetrievalStream);

  EmbeddingMatrix view_a(n, dim), view_b(n, dim), clean(n, dim), proto(n, dim), teacher(n, dim);
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long ii = 0; ii < nn; ++ii) {
    const auto i = static_cast<size_t>(ii);
    const Sample& s = dataset.samples[first + i];
    const ViewPair views = make_views(s.tensor, config.augmentation, rng.split(first + i), s.scene.id);
    const std::vector<double> a = forward(params, views.view_a).projected;
    const std::vector<double> b = forward(params, views.view_b).projected;
    const std::vector<double> c = forward(params, integrate_heatmap(s.tensor)).projected;
    const std::vector<double> t = oracle(s.scene).values;
    std::copy(c.begin(), c.end(), clean.row(i).begin());
    std::copy(a.begin(), a.end(), view_a.row(i).begin());
    std::copy(b.begin(), b.end(), view_b.row(i).begin());
    std::copy(t.begin(), t.end(), teacher.row(i).begin());
    const std::vector<double> p = prototype(a, b);
    std::copy(p.begin(), p.end(), proto.row(i).begin());
  }
  RetrievalReport rep;
  rep.n = n;
  rep.k = config.k;
  rep.chance = static_cast<double>(config.k) / static_cast<double>(n);
  rep.radar_radar = retrieval_topk(view_a, view_b, config.k);
  rep.radar_vision = retrieval_topk(clean, teacher, config.k);
  rep.radar_vision_prototype = retrieval_topk(proto, teacher, config.k);
  return rep;
}

void to_json(json& j, const RetrievalConfig& c) {
  j = json{{"holdout", c.holdout},
           {"k", c.k},
           {"seed", c.seed},
           {"augmentation", c.augmentation},
           {"oracle_seed", c.oracle_seed},
           {"oracle_max_scatterers", c.oracle_max_scatterers}};
}

void from_json(const json& j, RetrievalConfig& c) {
  c = RetrievalConfig{};
  c.holdout = j.value("holdout", c.holdout);
  c.k = j.value("k", c.k);
  c.seed = j.value("seed", c.seed);
  if (j.contains("augmentation")) j.at("augmentation").get_to(c.augmentation);
  c.oracle_seed = j.value("oracle_seed", c.oracle_seed);
  c.oracle_max_scatterers = j.value("oracle_max_scatterers", c.oracle_max_scatterers);
}

void to_json(json& j, const RetrievalReport& r) {
  j = json{{"radar_radar_topk", r.radar_radar},
           {"radar_vision_topk", r.radar_vision},
           {"radar_vision_prototype_topk", r.radar_vision_prototype},
           {"chance", r.chance},
           {"n", r.n},
           {"k", r.k}};
}

void to_json(json& j, const ProbeConfig& c) {
  j = json{{"ridge_lambda", c.ridge_lambda},
           {"label", c.label},
           {"train_fraction", c.train_fraction},
           {"holdout", c.holdout},
           {"seed", c.seed}};
}

void from_json(const json& j, ProbeConfig& c) {
  c = ProbeConfig{};
  c.ridge_lambda = j.value("ridge_lambda", c.ridge_lambda);
  c.label = j.value("label", c.label);
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  c.holdout = j.value("holdout", c.holdout);
  c.seed = j.value("seed", c.seed);
}

void to_json(json& j, const ProbeReport& r) {
  j = json{{"rmse", r.rmse},         {"rmse_x", r.rmse_x},   {"rmse_y", r.rmse_y},
           {"target_std", r.target_std}, {"n_train", r.n_train}, {"n_test", r.n_test}};
}

}  // namespace radkit
