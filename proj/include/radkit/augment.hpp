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
#ifndef RADKIT_AUGMENT_HPP_
#define RADKIT_AUGMENT_HPP_

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "radkit/radar_model.hpp"
#include "radkit/rng.hpp"

namespace radkit {

// ---------------------------------------------------------------------------
// Raw-domain (virtual array) augmentations: radar MIMO mask.
// ---------------------------------------------------------------------------

/// Per-antenna draws of one RMM application. The mask is drawn first and
/// the phases second, so the two raw ops can be applied in either order.
struct RmmDraw {
  std::vector<bool> keep;
  std::vector<double> phase;
};

/// keep[k] ~ Bernoulli(p) for k < K (p is the keep probability), then
/// phase[k] ~ U[-alpha*pi, alpha*pi).
RmmDraw draw_rmm(size_t num_virtual, double keep_prob, double alpha, RngStream& rng);

/// Multiplies antenna slab k by b_k in {0, 1}, b_k ~ Bernoulli(keep_prob).
VirtualArrayTensor antenna_dropout(const VirtualArrayTensor& tensor, double keep_prob, RngStream& rng);
/// Rotates each antenna slab by one phase theta_k ~ U[-alpha*pi, alpha*pi).
VirtualArrayTensor phase_noise(const VirtualArrayTensor& tensor, double alpha, RngStream& rng);

VirtualArrayTensor apply_mask(const VirtualArrayTensor& tensor, const std::vector<bool>& keep);
VirtualArrayTensor apply_phases(const VirtualArrayTensor& tensor, const std::vector<double>& phase);

constexpr double kDefaultKeepProb = 0.9;
constexpr double kDefaultPhaseAlpha = 0.1;

/// Dropout then phase noise then integration.
Heatmap rmm(const VirtualArrayTensor& tensor, double keep_prob, double alpha, RngStream& rng);

// ---------------------------------------------------------------------------
// Heatmap-domain augmentations. Polar-grid geometry: rows are range bins,
// columns are azimuth bins.
// ---------------------------------------------------------------------------

/// Shift along azimuth by shift_bins columns, zero-filling vacated columns.
Heatmap polar_rotate(const Heatmap& heatmap, int shift_bins);
/// Bilinear resample of the central ceil(f*L) x ceil(f*A) window to L x A.
Heatmap center_crop(const Heatmap& heatmap, double fraction);
Heatmap hflip(const Heatmap& heatmap);
Heatmap vflip(const Heatmap& heatmap);
/// Zeroes every value below the given percentile of this heatmap's values.
/// Kept values become 1 when binarize is set.
Heatmap threshold(const Heatmap& heatmap, double percentile, bool binarize = false);
/// Zeroes one random axis-aligned rectangle with sides of at most
/// ceil(max_frac * dim) cells.
Heatmap cutout(const Heatmap& heatmap, double max_frac, RngStream& rng);

// ---------------------------------------------------------------------------
// Declarative pipelines.
// ---------------------------------------------------------------------------

namespace aug {

struct AntennaDropout {
  double p = kDefaultKeepProb;
};
struct PhaseNoise {
  double alpha = kDefaultPhaseAlpha;
};
struct PolarRotate {
  int max_bins = 2;
};
struct CenterCrop {
  double min_fraction = 0.7;
};
struct HFlip {
  double prob = 0.5;
};
struct VFlip {
  double prob = 0.5;
};
struct Cutout {
  double max_frac = 0.25;
  double prob = 0.5;
};
struct Threshold {
  double percentile = 50.0;
  bool binarize = false;
};

using Op = std::variant<AntennaDropout, PhaseNoise, PolarRotate, CenterCrop, HFlip, VFlip, Cutout, Threshold>;

struct Step {
  Op op;
  double apply_prob = 1.0;
};

/// True for steps that act on the virtual-array tensor.
bool is_raw(const Op& op);
std::string op_name(const Op& op);

}  // namespace aug

/// The stochastic transformation set a view is drawn from.
struct AugmentationSpec {
  std::vector<aug::Step> steps;

  void validate() const;
  /// RMM + center crop (min 0.7) + horizontal flip (p 0.5).
  static AugmentationSpec defaults();
  static AugmentationSpec identity() { return {}; }
};

struct ViewPair {
  Heatmap view_a;
  Heatmap view_b;
  std::string source_id;
};

/// One draw t ~ spec applied to the tensor: raw steps in listed order, then
/// integration, then heatmap steps in listed order.
Heatmap draw_view(const VirtualArrayTensor& tensor, const AugmentationSpec& spec, RngStream rng);

/// Two independent draws from child streams 0 and 1 of rng.
ViewPair make_views(const VirtualArrayTensor& tensor, const AugmentationSpec& spec, const RngStream& rng,
                    std::string source_id = {});

void to_json(nlohmann::json& j, const AugmentationSpec& spec);
void from_json(const nlohmann::json& j, AugmentationSpec& spec);

}  // namespace radkit

#endif  // RADKIT_AUGMENT_HPP_
