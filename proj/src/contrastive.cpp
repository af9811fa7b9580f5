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
#include "radkit/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radkit/error.hpp"

namespace radkit {

using nlohmann::json;

EmbeddingMatrix::EmbeddingMatrix(size_t r, size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != rows * cols) throw std::invalid_argument("EmbeddingMatrix: size mismatch");
}

void ContrastiveConfig::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("contrastive: temperature must be > 0");
  if (!(lambda_cross >= 0.0)) throw ConfigError("contrastive: lambda_cross must be >= 0");
}

void EmbeddingBatch::validate(double tol) const {
  if (z.rows == 0) throw std::invalid_argument("embedding batch: B must be >= 1");
  if (z_prime.rows != z.rows || z_prime.cols != z.cols) throw std::invalid_argument("embedding batch: view shapes differ");
  if (z_vision && (z_vision->rows != z.rows || z_vision->cols != z.cols))
    throw std::invalid_argument("embedding batch: vision shape differs");
  auto check = [tol](const EmbeddingMatrix& m, const char* name) {
    for (size_t i = 0; i < m.rows; ++i) {
      double sq = 0.0;
      for (double v : m.row(i)) sq += v * v;
      if (std::abs(std::sqrt(sq) - 1.0) > tol)
        throw std::invalid_argument(std::string("embedding batch: ") + name + " row not unit norm");
    }
  };
  check(z, "z");
  check(z_prime, "z_prime");
  if (z_vision) check(*z_vision, "z_vision");
}

double sim(std::span<const double> x, std::span<const double> y, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("sim: temperature must be > 0");
  if (x.size() != y.size()) throw std::invalid_argument("sim: dimension mismatch");
  double dot = 0.0;
  for (size_t d = 0; d < x.size(); ++d) dot += x[d] * y[d];
  return dot / tau;
}

namespace {

// One InfoNCE term. The positive is (anchors[i], positives[i]); candidate
// j != i is negatives[j]. With weight != 0 and gradient outputs present,
// accumulates weight * dl/d(.) into them.
struct InfoNce {
  const EmbeddingMatrix& anchors;
  const EmbeddingMatrix& positives;
  const EmbeddingMatrix& negatives;
  double tau;

  double term(size_t i, double weight, EmbeddingMatrix* d_anchor, EmbeddingMatrix* d_positive,
              EmbeddingMatrix* d_negative) const {
    const size_t b = anchors.rows;
    std::vector<double> logits(b);
    for (size_t j = 0; j < b; ++j) {
      const EmbeddingMatrix& cand = (j == i) ? positives : negatives;
      logits[j] = sim(anchors.row(i), cand.row(j), tau);
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double s : logits) denom += std::exp(s - m);
    const double loss = std::log(denom) - (logits[i] - m);
    if (weight == 0.0 || d_anchor == nullptr) return loss;

    // dl/ds_j = p_j - [j == i]; ds_j/d(anchor) = cand_j / tau; ds_j/d(cand_j) = anchor / tau.
    const size_t dim = anchors.cols;
    auto da = d_anchor->row(i);
    const auto a = anchors.row(i);
    for (size_t j = 0; j < b; ++j) {
      const double coef = (std::exp(logits[j] - m) / denom - (j == i ? 1.0 : 0.0)) * weight / tau;
      if (coef == 0.0) continue;
      const EmbeddingMatrix& cand = (j == i) ? positives : negatives;
      EmbeddingMatrix* d_cand = (j == i) ? d_positive : d_negative;
      const auto c = cand.row(j);
      for (size_t d = 0; d < dim; ++d) da[d] += coef * c[d];
      if (d_cand != nullptr) {
        auto dc = d_cand->row(j);
        for (size_t d = 0; d < dim; ++d) dc[d] += coef * a[d];
      }
    }
    return loss;
  }
};

InfoNce intra_term(const EmbeddingBatch& batch, Direction direction, double tau, NegativesVariant negatives) {
  const EmbeddingMatrix& view = direction == Direction::kViewToOther ? batch.z : batch.z_prime;
  const EmbeddingMatrix& other = direction == Direction::kViewToOther ? batch.z_prime : batch.z;
  return {view, other, negatives == NegativesVariant::kOtherView ? other : view, tau};
}

void require_batch(const EmbeddingBatch& batch) {
  if (batch.z.rows == 0) throw std::invalid_argument("contrastive: empty batch");
  if (batch.z_prime.rows != batch.z.rows || batch.z_prime.cols != batch.z.cols)
    throw std::invalid_argument("contrastive: view shapes differ");
}

const EmbeddingMatrix& require_vision(const EmbeddingBatch& batch) {
  if (!batch.z_vision) throw std::invalid_argument("cross_loss: vision embeddings missing");
  if (batch.z_vision->rows != batch.z.rows || batch.z_vision->cols != batch.z.cols)
    throw std::invalid_argument("cross_loss: vision shape differs");
  return *batch.z_vision;
}

}  // namespace

double intra_pair_loss(const EmbeddingBatch& batch, size_t i, Direction direction, double tau,
                       NegativesVariant negatives) {
  require_batch(batch);
  if (i >= batch.size()) throw std::out_of_range("intra_pair_loss: sample index out of range");
  return intra_term(batch, direction, tau, negatives).term(i, 0.0, nullptr, nullptr, nullptr);
}

double intra_loss(const EmbeddingBatch& batch, double tau, NegativesVariant negatives) {
  require_batch(batch);
  const InfoNce fwd = intra_term(batch, Direction::kViewToOther, tau, negatives);
  const InfoNce rev = intra_term(batch, Direction::kOtherToView, tau, negatives);
  // Directions are summed separately so swapping the views is exact.
  double sum_fwd = 0.0, sum_rev = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    sum_fwd += fwd.term(i, 0.0, nullptr, nullptr, nullptr);
    sum_rev += rev.term(i, 0.0, nullptr, nullptr, nullptr);
  }
  return (sum_fwd + sum_rev) / (2.0 * static_cast<double>(batch.size()));
}

std::vector<double> prototype(std::span<const double> z, std::span<const double> z_prime) {
  if (z.size() != z_prime.size()) throw std::invalid_argument("prototype: dimension mismatch");
  std::vector<double> out(z.size());
  for (size_t d = 0; d < z.size(); ++d) out[d] = (z[d] + z_prime[d]) / 2.0;
  return out;
}

EmbeddingMatrix prototypes(const EmbeddingMatrix& z, const EmbeddingMatrix& z_prime) {
  if (z.rows != z_prime.rows || z.cols != z_prime.cols) throw std::invalid_argument("prototypes: shape mismatch");
  EmbeddingMatrix out(z.rows, z.cols);
  for (size_t k = 0; k < z.data.size(); ++k) out.data[k] = (z.data[k] + z_prime.data[k]) / 2.0;
  return out;
}

double cross_loss(const EmbeddingBatch& batch, double tau, bool symmetric) {
  require_batch(batch);
  const EmbeddingMatrix& vision = require_vision(batch);
  const EmbeddingMatrix proto = prototypes(batch.z, batch.z_prime);
  const InfoNce to_vision{proto, vision, vision, tau};
  const InfoNce to_radar{vision, proto, proto, tau};
  double sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    sum += to_vision.term(i, 0.0, nullptr, nullptr, nullptr);
    if (symmetric) sum += to_radar.term(i, 0.0, nullptr, nullptr, nullptr);
  }
  return sum / ((symmetric ? 2.0 : 1.0) * static_cast<double>(batch.size()));
}

LossBreakdown composite_loss(const EmbeddingBatch& batch, const ContrastiveConfig& config) {
  config.validate();
  LossBreakdown out;
  out.intra = intra_loss(batch, config.temperature, config.negatives);
  out.total = out.intra;
  if (config.lambda_cross != 0.0) {
    out.cross = cross_loss(batch, config.temperature, config.symmetric_cross);
    out.total = out.intra + config.lambda_cross * out.cross;
  }
  return out;
}

LossGradients loss_gradients(const EmbeddingBatch& batch, const ContrastiveConfig& config) {
  config.validate();
  require_batch(batch);
  const size_t b = batch.size();
  const size_t dim = batch.z.cols;
  const double tau = config.temperature;
  LossGradients g;
  g.d_z = EmbeddingMatrix(b, dim);
  g.d_z_prime = EmbeddingMatrix(b, dim);
  g.d_z_vision = EmbeddingMatrix(b, dim);

  const double w_intra = 1.0 / (2.0 * static_cast<double>(b));
  const InfoNce fwd = intra_term(batch, Direction::kViewToOther, tau, config.negatives);
  const InfoNce rev = intra_term(batch, Direction::kOtherToView, tau, config.negatives);
  const bool same_view = config.negatives == NegativesVariant::kSameView;
  double intra_fwd = 0.0, intra_rev = 0.0;
  for (size_t i = 0; i < b; ++i) {
    intra_fwd += fwd.term(i, w_intra, &g.d_z, &g.d_z_prime, same_view ? &g.d_z : &g.d_z_prime);
    intra_rev += rev.term(i, w_intra, &g.d_z_prime, &g.d_z, same_view ? &g.d_z_prime : &g.d_z);
  }
  g.loss.intra = (intra_fwd + intra_rev) / (2.0 * static_cast<double>(b));
  g.loss.total = g.loss.intra;

  if (config.lambda_cross != 0.0) {
    const EmbeddingMatrix& vision = require_vision(batch);
    const EmbeddingMatrix proto = prototypes(batch.z, batch.z_prime);
    EmbeddingMatrix d_proto(b, dim);
    // Teacher gradients are computed into a scratch block and discarded.
    EmbeddingMatrix d_vision_scratch(b, dim);
    const double dirs = config.symmetric_cross ? 2.0 : 1.0;
    const double w_cross = config.lambda_cross / (dirs * static_cast<double>(b));
    const InfoNce to_vision{proto, vision, vision, tau};
    const InfoNce to_radar{vision, proto, proto, tau};
    double cross_sum = 0.0;
    for (size_t i = 0; i < b; ++i) {
      cross_sum += to_vision.term(i, w_cross, &d_proto, &d_vision_scratch, &d_vision_scratch);
      if (config.symmetric_cross) cross_sum += to_radar.term(i, w_cross, &d_vision_scratch, &d_proto, &d_proto);
    }
    g.loss.cross = cross_sum / (dirs * static_cast<double>(b));
    g.loss.total = g.loss.intra + config.lambda_cross * g.loss.cross;
    for (size_t k = 0; k < d_proto.data.size(); ++k) {
      g.d_z.data[k] += d_proto.data[k] / 2.0;
      g.d_z_prime.data[k] += d_proto.data[k] / 2.0;
    }
  }
  return g;
}

void to_json(json& j, const ContrastiveConfig& c) {
  j = json{{"temperature", c.temperature},
           {"lambda_cross", c.lambda_cross},
           {"symmetric_cross", c.symmetric_cross},
           {"negatives_variant", c.negatives == NegativesVariant::kOtherView ? "other_view" : "same_view"}};
}

void from_json(const json& j, ContrastiveConfig& c) {
  c = ContrastiveConfig{};
  c.temperature = j.value("temperature", c.temperature);
  c.lambda_cross = j.value("lambda_cross", c.lambda_cross);
  c.symmetric_cross = j.value("symmetric_cross", c.symmetric_cross);
  const std::string variant = j.value("negatives_variant", std::string("other_view"));
  if (variant == "other_view")
    c.negatives = NegativesVariant::kOtherView;
  else if (variant == "same_view")
    c.negatives = NegativesVariant::kSameView;
  else
    throw ConfigError("contrastive: negatives_variant must be other_view or same_view");
}

}  // namespace radkit
