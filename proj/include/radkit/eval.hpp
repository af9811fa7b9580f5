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
#ifndef RADKIT_EVAL_HPP_
#define RADKIT_EVAL_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "radkit/contrastive.hpp"
#include "radkit/radar_model.hpp"

namespace radkit {

/// A scored box in one frame. Ground truth uses the same record with no score.
struct Detection {
  std::string frame_id;
  RotatedBox box;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Corners in counter-clockwise order.
std::array<Point2, 4> box_corners(const RotatedBox& box);
/// Signed shoelace area (positive for counter-clockwise).
double polygon_area(const std::vector<Point2>& poly);
/// Sutherland-Hodgman: subject clipped by a convex counter-clockwise clipper.
std::vector<Point2> clip_polygon(const std::vector<Point2>& subject, const std::vector<Point2>& clipper);

/// Intersection-over-union of two rotated boxes, in [0, 1]. Throws
/// std::invalid_argument for a zero-area box.
double rotated_iou(const RotatedBox& a, const RotatedBox& b);

struct MatchResult {
  std::vector<bool> true_positive;  // per detection, input order
  size_t false_negatives = 0;
};

/// COCO-style greedy matching inside one frame: detections by descending
/// score (ties keep input order) each take the unmatched ground truth with
/// the highest IoU >= iou_thr.
MatchResult greedy_match(const std::vector<RotatedBox>& dets, const std::vector<RotatedBox>& gts, double iou_thr);

/// 101-point interpolated precision-recall curve.
struct PRCurve {
  std::array<double, 101> recall{};
  std::array<double, 101> precision{};
};

PRCurve pr_curve(const std::vector<Detection>& dets, const std::vector<Detection>& gts, double iou_thr);
/// Mean interpolated precision over the 101-point recall grid. Throws
/// DataError when there is no ground truth.
double average_precision(const std::vector<Detection>& dets, const std::vector<Detection>& gts, double iou_thr);
/// Thresholds 0.50, 0.55, ..., 0.95.
std::array<double, 10> coco_iou_thresholds();
double mean_ap(const std::vector<Detection>& dets, const std::vector<Detection>& gts);

enum class VehicleCategory { kStraight, kOriented, kIncoming };

/// straight within 5 degrees of yaw 0, incoming within 5 degrees of pi,
/// oriented otherwise.
VehicleCategory categorize_box(const RotatedBox& box);
std::string category_name(VehicleCategory c);

struct ApSummary {
  double ap50 = 0.0;
  double ap75 = 0.0;
  double map = 0.0;
};

struct DetectionReport {
  ApSummary overall;
  std::optional<ApSummary> straight;
  std::optional<ApSummary> oriented;
  std::optional<ApSummary> incoming;
};

/// Overall and per-category metrics; a category without ground truth is
/// left empty.
DetectionReport evaluate_detections(const std::vector<Detection>& dets, const std::vector<Detection>& gts);

/// Fraction of queries whose key at the same index ranks in the top k by
/// cosine similarity; equal similarities rank by key index.
double retrieval_topk(const EmbeddingMatrix& queries, const EmbeddingMatrix& keys, size_t k);

void to_json(nlohmann::json& j, const Detection& d);
void from_json(const nlohmann::json& j, Detection& d);
void to_json(nlohmann::json& j, const ApSummary& s);
void to_json(nlohmann::json& j, const DetectionReport& r);

}  // namespace radkit

#endif  // RADKIT_EVAL_HPP_
