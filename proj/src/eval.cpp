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
#include "radkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "radkit/error.hpp"
#include "radkit/io.hpp"

namespace radkit {

using nlohmann::json;

std::array<Point2, 4> box_corners(const RotatedBox& box) {
  // Heading (sin yaw, cos yaw); its right-hand normal (cos yaw, -sin yaw).
  const double s = std::sin(box.yaw);
  const double c = std::cos(box.yaw);
  const double hl = box.length / 2.0;
  const double hw = box.width / 2.0;
  const Point2 h{s * hl, c * hl};
  const Point2 n{c * hw, -s * hw};
  // front-left, rear-left, rear-right, front-right: counter-clockwise.
  return {Point2{box.cx + h.x - n.x, box.cy + h.y - n.y}, Point2{box.cx - h.x - n.x, box.cy - h.y - n.y},
          Point2{box.cx - h.x + n.x, box.cy - h.y + n.y}, Point2{box.cx + h.x + n.x, box.cy + h.y + n.y}};
}

double polygon_area(const std::vector<Point2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return twice / 2.0;
}

std::vector<Point2> clip_polygon(const std::vector<Point2>& subject, const std::vector<Point2>& clipper) {
  std::vector<Point2> out = subject;
  for (size_t e = 0; e < clipper.size() && !out.empty(); ++e) {
    const Point2 a = clipper[e];
    const Point2 b = clipper[(e + 1) % clipper.size()];
    // > 0 inside (left of a->b for a counter-clockwise clipper).
    auto side = [&](const Point2& p) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); };
    std::vector<Point2> in = std::move(out);
    out.clear();
    for (size_t i = 0; i < in.size(); ++i) {
      const Point2 p = in[i];
      const Point2 q = in[(i + 1) % in.size()];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return out;
}

double rotated_iou(const RotatedBox& a, const RotatedBox& b) {
  if (!(a.length > 0.0 && a.width > 0.0 && b.length > 0.0 && b.width > 0.0))
    throw std::invalid_argument("rotated_iou: degenerate box");
  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  // Cheap reject: centres farther apart than the sum of half-diagonals.
  const double reach = std::hypot(a.length, a.width) / 2.0 + std::hypot(b.length, b.width) / 2.0;
  if (std::hypot(a.cx - b.cx, a.cy - b.cy) > reach) return 0.0;
  const std::vector<Point2> inter =
      clip_polygon(std::vector<Point2>(ca.begin(), ca.end()), std::vector<Point2>(cb.begin(), cb.end()));
  const double inter_area = std::max(0.0, polygon_area(inter));
  const double uni = area_a + area_b - inter_area;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter_area / uni, 0.0, 1.0);
}

MatchResult greedy_match(const std::vector<RotatedBox>& dets, const std::vector<RotatedBox>& gts, double iou_thr) {
  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return dets[i].score.value_or(0.0) > dets[j].score.value_or(0.0);
  });
  MatchResult res;
  res.true_positive.assign(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  size_t matched = 0;
  for (size_t d : order) {
    double best = -1.0;
    size_t best_g = gts.size();
    for (size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double iou = rotated_iou(dets[d], gts[g]);
      if (iou >= iou_thr && iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best_g < gts.size()) {
      taken[best_g] = true;
      res.true_positive[d] = true;
      ++matched;
    }
  }
  res.false_negatives = gts.size() - matched;
  return res;
}

PRCurve pr_curve(const std::vector<Detection>& dets, const std::vector<Detection>& gts, double iou_thr) {
  if (gts.empty()) throw DataError("average_precision: no ground-truth boxes");
  std::map<std::string, std::vector<RotatedBox>> gt_by_frame;
  for (const auto& g : gts) gt_by_frame[g.frame_id].push_back(g.box);

  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return dets[i].box.score.value_or(0.0) > dets[j].box.score.value_or(0.0);
  });

  // Greedy matching per frame in global score order.
  std::map<std::string, std::vector<bool>> taken;
  for (const auto& [frame, boxes] : gt_by_frame) taken[frame].assign(boxes.size(), false);
  std::vector<double> precision;
  std::vector<size_t> tp_at;  // true positives among the first k+1 detections
  size_t tp = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const Detection& det = dets[order[rank]];
    auto it = gt_by_frame.find(det.frame_id);
    if (it != gt_by_frame.end()) {
      auto& used = taken[det.frame_id];
      double best = -1.0;
      size_t best_g = used.size();
      for (size_t g = 0; g < it->second.size(); ++g) {
        if (used[g]) continue;
        const double iou = rotated_iou(det.box, it->second[g]);
        if (iou >= iou_thr && iou > best) {
          best = iou;
          best_g = g;
        }
      }
      if (best_g < used.size()) {
        used[best_g] = true;
        ++tp;
      }
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(rank + 1));
    tp_at.push_back(tp);
  }

  // Recall tp/G >= i/100 compared exactly as tp*100 >= i*G.
  PRCurve curve;
  const size_t n_gt = gts.size();
  for (size_t i = 0; i <= 100; ++i) {
    double best = 0.0;
    for (size_t k = 0; k < tp_at.size(); ++k)
      if (tp_at[k] * 100 >= i * n_gt) best = std::max(best, precision[k]);
    curve.recall[i] = static_cast<double>(i) / 100.0;
    curve.precision[i] = best;
  }
  return curve;
}

double average_precision(const std::vector<Detection>& dets, const std::vector<Detection>& gts, double iou_thr) {
  const PRCurve curve = pr_curve(dets, gts, iou_thr);
  double sum = 0.0;
  for (double p : curve.precision) sum += p;
  return sum / 101.0;
}

std::array<double, 10> coco_iou_thresholds() {
  std::array<double, 10> t{};
  for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(50 + 5 * i) / 100.0;
  return t;
}

double mean_ap(const std::vector<Detection>& dets, const std::vector<Detection>& gts) {
  double sum = 0.0;
  for (double thr : coco_iou_thresholds()) sum += average_precision(dets, gts, thr);
  return sum / 10.0;
}

VehicleCategory categorize_box(const RotatedBox& box) {
  const double tol = 5.0 * std::numbers::pi / 180.0;
  const double yaw = std::remainder(box.yaw, 2.0 * std::numbers::pi);  // [-pi, pi]
  if (std::abs(yaw) <= tol) return VehicleCategory::kStraight;
  if (std::numbers::pi - std::abs(yaw) <= tol) return VehicleCategory::kIncoming;
  return VehicleCategory::kOriented;
}

std::string category_name(VehicleCategory c) {
  switch (c) {
    case VehicleCategory::kStraight:
      return "straight";
    case VehicleCategory::kOriented:
      return "oriented";
    case VehicleCategory::kIncoming:
      return "incoming";
  }
  return "unknown";
}

namespace {

ApSummary summarize(const std::vector<Detection>& dets, const std::vector<Detection>& gts) {
  ApSummary s;
  s.ap50 = average_precision(dets, gts, 0.5);
  s.ap75 = average_precision(dets, gts, 0.75);
  s.map = mean_ap(dets, gts);
  return s;
}

}  // namespace

DetectionReport evaluate_detections(const std::vector<Detection>& dets, const std::vector<Detection>& gts) {
  DetectionReport report;
  report.overall = summarize(dets, gts);
  for (VehicleCategory cat : {VehicleCategory::kStraight, VehicleCategory::kOriented, VehicleCategory::kIncoming}) {
    std::vector<Detection> d, g;
    for (const auto& x : dets)
      if (categorize_box(x.box) == cat) d.push_back(x);
    for (const auto& x : gts)
      if (categorize_box(x.box) == cat) g.push_back(x);
    if (g.empty()) continue;
    const ApSummary s = summarize(d, g);
    if (cat == VehicleCategory::kStraight) report.straight = s;
    if (cat == VehicleCategory::kOriented) report.oriented = s;
    if (cat == VehicleCategory::kIncoming) report.incoming = s;
  }
  return report;
}

double retrieval_topk(const EmbeddingMatrix& queries, const EmbeddingMatrix& keys, size_t k) {
  if (queries.rows != keys.rows || queries.cols != keys.cols)
    throw std::invalid_argument("retrieval_topk: query/key count or dimension mismatch");
  if (k == 0) throw std::invalid_argument("retrieval_topk: k must be >= 1");
  const size_t n = queries.rows;
  if (n == 0) return 0.0;
  auto norms = [](const EmbeddingMatrix& m) {
    std::vector<double> out(m.rows);
    for (size_t i = 0; i < m.rows; ++i) {
      double sq = 0.0;
      for (double v : m.row(i)) sq += v * v;
      out[i] = std::sqrt(sq);
    }
    return out;
  };
  const std::vector<double> qn = norms(queries);
  const std::vector<double> kn = norms(keys);
  size_t hits = 0;
  std::vector<double> s(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      const auto q = queries.row(i);
      const auto key = keys.row(j);
      for (size_t d = 0; d < q.size(); ++d) dot += q[d] * key[d];
      const double denom = qn[i] * kn[j];
      s[j] = denom > 0.0 ? dot / denom : 0.0;
    }
    size_t rank = 0;
    for (size_t j = 0; j < n; ++j)
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++rank;
    if (rank < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

void to_json(json& j, const Detection& d) {
  j = json(d.box);
  j["frame_id"] = d.frame_id;
}

void from_json(const json& j, Detection& d) {
  j.at("frame_id").get_to(d.frame_id);
  d.box = j.get<RotatedBox>();
  if (d.box.score && (*d.box.score < 0.0 || *d.box.score > 1.0))
    throw DataError("detection score must be in [0, 1]");
}

void to_json(json& j, const ApSummary& s) { j = json{{"ap50", s.ap50}, {"ap75", s.ap75}, {"map", s.map}}; }

void to_json(json& j, const DetectionReport& r) {
  j = json{{"ap50", r.overall.ap50}, {"ap75", r.overall.ap75}, {"map", r.overall.map}};
  auto opt = [](const std::optional<ApSummary>& s) { return s ? json(*s) : json(nullptr); };
  j["per_category"] = json{{"straight", opt(r.straight)}, {"oriented", opt(r.oriented)}, {"incoming", opt(r.incoming)}};
}

}  // namespace radkit
