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
#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "radkit/contrastive.hpp"
#include "radkit/error.hpp"

namespace radkit {
namespace {

// log(1 + e^-1) and log(1 + 3 e^-10), evaluated at 50 digits.
constexpr double kLogOnePlusInvE = 0.31326168751822283;
constexpr double kAlignedOrthogonal = 1.3619051493825e-4;

EmbeddingMatrix basis_rows(size_t b, size_t d) {
  EmbeddingMatrix m(b, d);
  for (size_t i = 0; i < b; ++i) m.row(i)[i] = 1.0;
  return m;
}

EmbeddingBatch random_batch(size_t b, size_t d, RngStream& r, bool vision = true) {
  EmbeddingBatch batch;
  batch.z = oracle::random_unit_rows(b, d, r);
  batch.z_prime = oracle::random_unit_rows(b, d, r);
  if (vision) batch.z_vision = oracle::random_unit_rows(b, d, r);
  return batch;
}

TEST(Sim, Examples) {
  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0}, y{0.6, 0.8, 0};
  EXPECT_DOUBLE_EQ(sim(e1, e1, 0.5), 2.0);
  EXPECT_EQ(sim(e1, e2, 0.1), 0.0);
  EXPECT_NEAR(sim(e1, y, 0.1), 6.0, 1e-12);
  EXPECT_THROW(sim(e1, e1, 0.0), std::invalid_argument);
}

TEST(Intra, SingleSampleIsZero) {
  RngStream r(1, 1);
  const EmbeddingBatch b = random_batch(1, 5, r);
  EXPECT_EQ(intra_pair_loss(b, 0, Direction::kViewToOther, 0.1), 0.0);
  EXPECT_EQ(intra_loss(b, 0.1), 0.0);
  EXPECT_EQ(cross_loss(b, 0.1), 0.0);
  const LossGradients g = loss_gradients(b, {});
  for (double v : g.d_z.data) EXPECT_EQ(v, 0.0);
  for (double v : g.d_z_prime.data) EXPECT_EQ(v, 0.0);
}

TEST(Intra, TwoSampleClosedForm) {
  EmbeddingBatch b;
  b.z = basis_rows(2, 3);
  b.z_prime = basis_rows(2, 3);
  EXPECT_NEAR(intra_pair_loss(b, 0, Direction::kViewToOther, 1.0), kLogOnePlusInvE, 1e-9);
  EXPECT_NEAR(intra_pair_loss(b, 0, Direction::kOtherToView, 1.0), kLogOnePlusInvE, 1e-9);
}

TEST(Intra, IdenticalEmbeddingsGiveLogB) {
  for (size_t n : {2u, 4u, 8u}) {
    EmbeddingBatch b;
    b.z = EmbeddingMatrix(n, 3);
    for (size_t i = 0; i < n; ++i) b.z.row(i)[1] = 1.0;
    b.z_prime = b.z;
    EXPECT_NEAR(intra_loss(b, 0.1), std::log(static_cast<double>(n)), 1e-9);
    for (size_t i = 0; i < n; ++i)
      EXPECT_NEAR(intra_pair_loss(b, i, Direction::kViewToOther, 0.1), std::log(static_cast<double>(n)), 1e-9);
  }
  EmbeddingBatch four;
  four.z = EmbeddingMatrix(4, 2, {1, 0, 1, 0, 1, 0, 1, 0});
  four.z_prime = four.z;
  EXPECT_NEAR(intra_loss(four, 1.0), 1.3862943611198906, 1e-9);
}

TEST(Intra, AlignedOrthogonalClosedForm) {
  EmbeddingBatch b;
  b.z = basis_rows(4, 6);
  b.z_prime = basis_rows(4, 6);
  EXPECT_NEAR(intra_loss(b, 0.1), kAlignedOrthogonal, 1e-15);
}

TEST(Intra, SwapViewsIsExact) {
  RngStream r(2, 2);
  for (int t = 0; t < 20; ++t) {
    EmbeddingBatch b = random_batch(6, 8, r, false);
    EmbeddingBatch s;
    s.z = b.z_prime;
    s.z_prime = b.z;
    EXPECT_EQ(intra_loss(b, 0.1), intra_loss(s, 0.1));
  }
}

TEST(Intra, LossShrinksAsPositivesAlign) {
  // Positives aligned and negatives orthogonal: the loss decreases toward 0
  // as tau falls.
  EmbeddingBatch b;
  b.z = basis_rows(4, 4);
  b.z_prime = basis_rows(4, 4);
  double prev = intra_loss(b, 1.0);
  for (double tau : {0.5, 0.2, 0.1, 0.05}) {
    const double l = intra_loss(b, tau);
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(Intra, StableForLargeSimilarities) {
  EmbeddingBatch b;
  b.z = EmbeddingMatrix(2, 2, {1, 0, -1, 0});
  b.z_prime = EmbeddingMatrix(2, 2, {1, 0, -1, 0});
  // sims reach +-500 at tau = 1/500.
  const double l = intra_loss(b, 1.0 / 500.0);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, 0.0, 1e-12);
  b.z_prime = EmbeddingMatrix(2, 2, {-1, 0, 1, 0});
  EXPECT_NEAR(intra_loss(b, 1.0 / 500.0), 1000.0, 1e-9);
  const LossGradients g = loss_gradients(b, {1.0 / 500.0, 0.0});
  for (double v : g.d_z.data) EXPECT_TRUE(std::isfinite(v));
}

TEST(Intra, SameViewVariantDiffersAndIsFinite) {
  RngStream r(3, 3);
  const EmbeddingBatch b = random_batch(5, 6, r, false);
  const double other = intra_loss(b, 0.1, NegativesVariant::kOtherView);
  const double same = intra_loss(b, 0.1, NegativesVariant::kSameView);
  EXPECT_TRUE(std::isfinite(same));
  EXPECT_NE(other, same);
}

TEST(Prototype, Examples) {
  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0}, m1{-1, 0, 0};
  EXPECT_EQ(prototype(e1, e1), e1);
  EXPECT_EQ(prototype(e1, e2), (std::vector<double>{0.5, 0.5, 0}));
  EXPECT_EQ(prototype(e1, m1), (std::vector<double>{0, 0, 0}));
}

TEST(Cross, TwoSampleClosedForm) {
  EmbeddingBatch b;
  b.z = basis_rows(2, 3);
  b.z_prime = basis_rows(2, 3);
  b.z_vision = basis_rows(2, 3);
  EXPECT_NEAR(cross_loss(b, 1.0), kLogOnePlusInvE, 1e-9);
}

TEST(Cross, AlignedOrthogonalClosedForm) {
  EmbeddingBatch b;
  b.z = basis_rows(4, 4);
  b.z_prime = basis_rows(4, 4);
  b.z_vision = basis_rows(4, 4);
  EXPECT_NEAR(cross_loss(b, 0.1), kAlignedOrthogonal, 1e-15);
  EXPECT_NEAR(cross_loss(b, 0.1, true), kAlignedOrthogonal, 1e-15);
  const LossBreakdown l = composite_loss(b, {0.1, 1.0});
  EXPECT_NEAR(l.total, 2.0 * kAlignedOrthogonal, 1e-15);
}

TEST(Cross, MissingVisionIsRejected) {
  RngStream r(4, 4);
  const EmbeddingBatch b = random_batch(3, 4, r, false);
  EXPECT_ANY_THROW(cross_loss(b, 0.1));
  EXPECT_NO_THROW(composite_loss(b, {0.1, 0.0}));
}

TEST(Composite, ZeroLambdaIsIntraBitExact) {
  RngStream r(5, 5);
  for (int t = 0; t < 10; ++t) {
    const EmbeddingBatch b = random_batch(8, 6, r);
    const LossBreakdown l = composite_loss(b, {0.1, 0.0});
    EXPECT_EQ(l.total, intra_loss(b, 0.1));
    EXPECT_EQ(l.cross, 0.0);
  }
}

TEST(Composite, AffineInLambda) {
  RngStream r(6, 6);
  const EmbeddingBatch b = random_batch(8, 6, r);
  const double intra = intra_loss(b, 0.1);
  const double cross = cross_loss(b, 0.1);
  for (double lambda : {0.0, 0.5, 1.0, 2.0})
    EXPECT_NEAR(composite_loss(b, {0.1, lambda}).total, intra + lambda * cross, 1e-12);
}

TEST(Composite, ConfigValidation) {
  EXPECT_THROW((ContrastiveConfig{0.0, 1.0}).validate(), ConfigError);
  EXPECT_THROW((ContrastiveConfig{0.1, -1.0}).validate(), ConfigError);
  const ContrastiveConfig c{0.2, 3.0, true, NegativesVariant::kSameView};
  const ContrastiveConfig back = nlohmann::json(c).get<ContrastiveConfig>();
  EXPECT_EQ(back.temperature, 0.2);
  EXPECT_EQ(back.lambda_cross, 3.0);
  EXPECT_TRUE(back.symmetric_cross);
  EXPECT_EQ(back.negatives, NegativesVariant::kSameView);
}

TEST(Batch, ValidationChecksNormsAndShapes) {
  RngStream r(7, 7);
  EmbeddingBatch b = random_batch(3, 4, r);
  EXPECT_NO_THROW(b.validate());
  b.z.row(1)[0] += 1e-3;
  EXPECT_ANY_THROW(b.validate());
  EmbeddingBatch c = random_batch(3, 4, r);
  c.z_prime = oracle::random_unit_rows(2, 4, r);
  EXPECT_ANY_THROW(c.validate());
}

// Finite differences of the composite loss on raw coordinates.
void check_gradients(const EmbeddingBatch& b, const ContrastiveConfig& cfg) {
  const LossGradients g = loss_gradients(b, cfg);
  EXPECT_NEAR(g.loss.total, composite_loss(b, cfg).total, 1e-12);
  std::vector<double> flat = b.z.data;
  flat.insert(flat.end(), b.z_prime.data.begin(), b.z_prime.data.end());
  const size_t half = b.z.data.size();
  const auto numeric = oracle::central_difference(
      [&](const std::vector<double>& x) {
        EmbeddingBatch q = b;
        std::copy(x.begin(), x.begin() + static_cast<long>(half), q.z.data.begin());
        std::copy(x.begin() + static_cast<long>(half), x.end(), q.z_prime.data.begin());
        return composite_loss(q, cfg).total;
      },
      flat, 1e-6);
  std::vector<double> analytic = g.d_z.data;
  analytic.insert(analytic.end(), g.d_z_prime.data.begin(), g.d_z_prime.data.end());
  EXPECT_LT(oracle::max_relative_error(analytic, numeric), 1e-7);
  for (double v : g.d_z_vision.data) EXPECT_EQ(v, 0.0);
}

TEST(Gradients, MatchFiniteDifferences) {
  RngStream r(8, 8);
  for (size_t n : {2u, 4u, 8u}) {
    for (int t = 0; t < 3; ++t) {
      const EmbeddingBatch b = random_batch(n, 6, r);
      check_gradients(b, {0.5, 1.0});
      check_gradients(b, {0.5, 0.0});
      check_gradients(b, {0.5, 0.7, true});
      check_gradients(b, {0.5, 1.0, false, NegativesVariant::kSameView});
    }
  }
}

TEST(Gradients, VisionGradientIsZeroShaped) {
  RngStream r(9, 9);
  const EmbeddingBatch b = random_batch(4, 5, r);
  const LossGradients g = loss_gradients(b, {0.1, 2.0, true});
  EXPECT_EQ(g.d_z_vision.rows, 4u);
  EXPECT_EQ(g.d_z_vision.cols, 5u);
  for (double v : g.d_z_vision.data) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace radkit
