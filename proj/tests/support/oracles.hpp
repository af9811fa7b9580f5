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
// Independent reference computations shared by the unit tests and the
// acceptance runner. None of these call into the code they check, except
// where noted.
#ifndef RADKIT_TESTS_ORACLES_HPP_
#define RADKIT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "radkit/contrastive.hpp"
#include "radkit/encoder.hpp"
#include "radkit/eval.hpp"
#include "radkit/rng.hpp"

namespace radkit::oracle {

inline bool inside_box(const RotatedBox& b, double x, double y) {
  const double dx = x - b.cx;
  const double dy = y - b.cy;
  const double along = dx * std::sin(b.yaw) + dy * std::cos(b.yaw);
  const double across = dx * std::cos(b.yaw) - dy * std::sin(b.yaw);
  return std::abs(along) <= b.length / 2.0 && std::abs(across) <= b.width / 2.0;
}

/// Monte-Carlo IoU: one jittered sample per cell of an n x n grid over the
/// joint bounding square.
inline double monte_carlo_iou(const RotatedBox& a, const RotatedBox& b, RngStream rng, size_t n = 1000) {
  const double ra = std::hypot(a.length, a.width) / 2.0;
  const double rb = std::hypot(b.length, b.width) / 2.0;
  const double x0 = std::min(a.cx - ra, b.cx - rb);
  const double x1 = std::max(a.cx + ra, b.cx + rb);
  const double y0 = std::min(a.cy - ra, b.cy - rb);
  const double y1 = std::max(a.cy + ra, b.cy + rb);
  const double sx = (x1 - x0) / static_cast<double>(n);
  const double sy = (y1 - y0) / static_cast<double>(n);
  size_t both = 0, either = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const double x = x0 + (static_cast<double>(i) + rng.uniform()) * sx;
      const double y = y0 + (static_cast<double>(j) + rng.uniform()) * sy;
      const bool in_a = inside_box(a, x, y);
      const bool in_b = inside_box(b, x, y);
      both += (in_a && in_b);
      either += (in_a || in_b);
    }
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

/// AP by recomputing the greedy matching from scratch on every prefix of
/// the score-ordered detections. Uses radkit::rotated_iou for overlaps.
inline double brute_force_ap(const std::vector<Detection>& dets, const std::vector<Detection>& gts, double thr) {
  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return *dets[i].box.score > *dets[j].box.score; });
  const size_t g = gts.size();
  std::vector<size_t> tp_prefix;
  for (size_t k = 1; k <= order.size(); ++k) {
    std::vector<bool> used(g, false);
    size_t tp = 0;
    for (size_t r = 0; r < k; ++r) {
      const Detection& d = dets[order[r]];
      size_t best = g;
      double best_iou = -1.0;
      for (size_t q = 0; q < g; ++q) {
        if (used[q] || gts[q].frame_id != d.frame_id) continue;
        const double iou = rotated_iou(d.box, gts[q].box);
        if (iou >= thr && iou > best_iou) {
          best_iou = iou;
          best = q;
        }
      }
      if (best < g) {
        used[best] = true;
        ++tp;
      }
    }
    tp_prefix.push_back(tp);
  }
  double sum = 0.0;
  for (size_t i = 0; i <= 100; ++i) {
    double best = 0.0;
    for (size_t k = 0; k < tp_prefix.size(); ++k)
      if (tp_prefix[k] * 100 >= i * g)
        best = std::max(best, static_cast<double>(tp_prefix[k]) / static_cast<double>(k + 1));
    sum += best;
  }
  return sum / 101.0;
}

/// Two frames, two ground truths; detections: hit (0.9), miss (0.8), hit (0.7).
inline void hand_ap_case(std::vector<Detection>& dets, std::vector<Detection>& gts) {
  const RotatedBox g0{0.0, 10.0, 4.5, 1.9, 0.0, std::nullopt};
  const RotatedBox g1{5.0, 15.0, 4.5, 1.9, 0.3, std::nullopt};
  gts = {{"f0", g0}, {"f1", g1}};
  RotatedBox d0 = g0, d1{-10.0, 20.0, 4.5, 1.9, 0.0, std::nullopt}, d2 = g1;
  d0.score = 0.9;
  d1.score = 0.8;
  d2.score = 0.7;
  dets = {{"f0", d0}, {"f0", d1}, {"f1", d2}};
}

inline constexpr double kHandAp = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max |a - b| / max |b|: norm-wise relative error.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

inline EmbeddingMatrix random_unit_rows(size_t rows, size_t cols, RngStream& rng) {
  EmbeddingMatrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    double sq = 0.0;
    for (double& v : m.row(i)) {
      v = rng.normal();
      sq += v * v;
    }
    for (double& v : m.row(i)) v /= std::sqrt(sq);
  }
  return m;
}

/// Flattens every parameter tensor of a stack, in for_each_tensor order.
template <typename Real>
std::vector<double> flatten(const LayerStack<Real>& s) {
  std::vector<double> out;
  s.for_each_tensor([&](std::span<const Real> t) { out.insert(out.end(), t.begin(), t.end()); });
  return out;
}

template <typename Real>
void unflatten(LayerStack<Real>& s, const std::vector<double>& flat) {
  size_t pos = 0;
  s.for_each_tensor([&](std::span<Real> t) {
    for (auto& v : t) v = static_cast<Real>(flat[pos++]);
  });
}

}  // namespace radkit::oracle

#endif  // RADKIT_TESTS_ORACLES_HPP_
