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
#ifndef RADKIT_CONTRASTIVE_HPP_
#define RADKIT_CONTRASTIVE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace radkit {

/// Row-major B x D block of embeddings.
struct EmbeddingMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  EmbeddingMatrix(size_t r, size_t c, std::vector<double> values);

  std::span<double> row(size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Which embeddings serve as negatives in the intra-radar term.
enum class NegativesVariant {
  kOtherView,  // z'_j for all j (positive included once)
  kSameView,   // positive z'_i plus z_j for j != i
};

struct ContrastiveConfig {
  double temperature = 0.1;
  double lambda_cross = 1.0;
  bool symmetric_cross = false;
  NegativesVariant negatives = NegativesVariant::kOtherView;

  void validate() const;
};

struct EmbeddingBatch {
  EmbeddingMatrix z;
  EmbeddingMatrix z_prime;
  std::optional<EmbeddingMatrix> z_vision;

  size_t size() const { return z.rows; }
  /// Shapes agree, B >= 1, and every row is unit norm within tol.
  void validate(double tol = 1e-6) const;
};

enum class Direction {
  kViewToOther,  // r -> r'
  kOtherToView,  // r' -> r
};

/// x . y / tau.
double sim(std::span<const double> x, std::span<const double> y, double tau);

/// InfoNCE term for sample i: -log softmax of the positive among the
/// in-batch candidates. kOtherToView swaps the roles of z and z'.
double intra_pair_loss(const EmbeddingBatch& batch, size_t i, Direction direction, double tau,
                       NegativesVariant negatives = NegativesVariant::kOtherView);

/// Symmetric average (1 / 2B) sum_i (l_i^{r->r'} + l_i^{r'->r}).
double intra_loss(const EmbeddingBatch& batch, double tau, NegativesVariant negatives = NegativesVariant::kOtherView);

/// Elementwise mean of the two views; not re-normalized.
std::vector<double> prototype(std::span<const double> z, std::span<const double> z_prime);
EmbeddingMatrix prototypes(const EmbeddingMatrix& z, const EmbeddingMatrix& z_prime);

/// (1 / B) sum_i l_i^{proto->vision}; with symmetric set, the average of
/// both directions.
double cross_loss(const EmbeddingBatch& batch, double tau, bool symmetric = false);

struct LossBreakdown {
  double intra = 0.0;
  double cross = 0.0;
  double total = 0.0;
};

/// intra + lambda_cross * cross. The cross term is skipped (reported as 0)
/// when lambda_cross is 0.
LossBreakdown composite_loss(const EmbeddingBatch& batch, const ContrastiveConfig& config);

struct LossGradients {
  LossBreakdown loss;
  EmbeddingMatrix d_z;
  EmbeddingMatrix d_z_prime;
  EmbeddingMatrix d_z_vision;  // always zero: the teacher is frozen
};

/// Exact gradients of composite_loss wrt z and z'.
LossGradients loss_gradients(const EmbeddingBatch& batch, const ContrastiveConfig& config);

void to_json(nlohmann::json& j, const ContrastiveConfig& c);
void from_json(const nlohmann::json& j, ContrastiveConfig& c);

}  // namespace radkit

#endif  // RADKIT_CONTRASTIVE_HPP_
