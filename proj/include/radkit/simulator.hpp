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
#ifndef RADKIT_SIMULATOR_HPP_
#define RADKIT_SIMULATOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "radkit/radar_model.hpp"
#include "radkit/rng.hpp"

namespace radkit {

struct SimConfig {
  double range_spread_bins = 1.0;  // sinc main-lobe half-width, in range bins
  double noise_floor = 0.0;        // complex Gaussian std per antenna cell
  double tx_dwell = 0.0;           // seconds per transmitter slot
  double carrier_wavelength = 0.004;

  void validate() const;
};

/// sin(pi x) / (pi x), with sinc(0) = 1.
double sinc(double x);

/// pi * u_k * sin(azimuth). Throws std::out_of_range for a bad k.
double steering_phase(const ArrayGeometry& geometry, size_t k, double azimuth);

/// Phase a moving scatterer accrues by the time transmitter tx_index(k) fires.
double doppler_phase(const Scatterer& scatterer, size_t k, const ArrayGeometry& geometry,
                     const SimConfig& config);

/// Specular visibility mask, one Bernoulli draw per scatterer per frame.
std::vector<bool> draw_visibility(const Scene& scene, RngStream rng);

/// Virtual-array response of a scene: range sinc spread, physical array
/// phase across antennas, Doppler phase per TX slot, specular dropouts and
/// i.i.d. complex noise. Parallel over antennas; bit-identical for any
/// worker count.
VirtualArrayTensor synthesize_tensor(const Scene& scene, const ArrayGeometry& geometry,
                                     const PolarGrid& grid, const SimConfig& config,
                                     const RngStream& rng);

/// r(l, a) = |sum_k S(k, l, a)|. Parallel over range rows.
Heatmap integrate_heatmap(const VirtualArrayTensor& tensor);

/// Synthetic corpus generator settings.
struct SceneGenConfig {
  size_t scatterers_min = 1;
  size_t scatterers_max = 3;
  double amplitude_min = 0.5;
  double amplitude_max = 1.5;
  double visibility_min = 1.0;
  double visibility_max = 1.0;
  double speed_max = 0.0;       // |radial_velocity| bound, m/s
  double edge_margin_bins = 1.0;  // keep scatterers this far inside the grid
  double box_length = 4.5;
  double box_width = 1.9;

  void validate() const;
};

/// Scene `index` of a corpus: scatterers uniform in (range, azimuth) inside
/// the grid, each with a car-sized ground-truth box centred on it. A pure
/// function of (index, grid, config, rng).
Scene generate_scene(size_t index, const PolarGrid& grid, const SceneGenConfig& config, const RngStream& rng);

std::string scene_id(size_t index);

namespace serial {

// Straight-line references kept for equivalence tests and benchmarks.
VirtualArrayTensor synthesize_tensor(const Scene& scene, const ArrayGeometry& geometry,
                                     const PolarGrid& grid, const SimConfig& config,
                                     const RngStream& rng);
Heatmap integrate_heatmap(const VirtualArrayTensor& tensor);

}  // namespace serial

}  // namespace radkit

#endif  // RADKIT_SIMULATOR_HPP_
