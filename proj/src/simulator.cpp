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
#include "radkit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "radkit/error.hpp"
#include "radkit/parallel.hpp"

namespace radkit {

namespace {

using cd = std::complex<double>;

constexpr uint64_t kVisibilityStream = 0;
constexpr uint64_t kNoiseStream = 1;
// Each cell consumes two normals, i.e. four counters.
constexpr uint64_t kCountersPerCell = 4;

void check_inputs(const Scene& scene, const ArrayGeometry& geometry, const PolarGrid& grid,
                  const SimConfig& config) {
  grid.validate();
  geometry.validate();
  config.validate();
  for (size_t s = 0; s < scene.scatterers.size(); ++s) {
    const Scatterer& sc = scene.scatterers[s];
    if (!grid.contains(sc.range, sc.azimuth))
      throw DataError("scene '" + scene.id + "': scatterer " + std::to_string(s) + " outside grid");
  }
}

cd noise_sample(const RngStream& noise, size_t cell, double sigma) {
  RngStream s = noise.at(kCountersPerCell * cell);
  const double scale = sigma / std::numbers::sqrt2;
  const double re = s.normal();
  const double im = s.normal();
  return {scale * re, scale * im};
}

}  // namespace

void SimConfig::validate() const {
  if (!(range_spread_bins > 0.0)) throw ConfigError("sim: range_spread_bins must be > 0");
  if (!(noise_floor >= 0.0)) throw ConfigError("sim: noise_floor must be >= 0");
  if (!(tx_dwell >= 0.0)) throw ConfigError("sim: tx_dwell must be >= 0");
  if (!(carrier_wavelength > 0.0)) throw ConfigError("sim: carrier_wavelength must be > 0");
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double steering_phase(const ArrayGeometry& geometry, size_t k, double azimuth) {
  if (k >= geometry.num_virtual())
    throw std::out_of_range("steering_phase: antenna index " + std::to_string(k) + " out of range");
  return std::numbers::pi * geometry.element_pos[k] * std::sin(azimuth);
}

double doppler_phase(const Scatterer& scatterer, size_t k, const ArrayGeometry& geometry,
                     const SimConfig& config) {
  const double tx = static_cast<double>(geometry.tx_index(k));
  return (4.0 * std::numbers::pi / config.carrier_wavelength) * scatterer.radial_velocity *
         config.tx_dwell * tx;
}

std::vector<bool> draw_visibility(const Scene& scene, RngStream rng) {
  std::vector<bool> mask(scene.scatterers.size());
  for (size_t s = 0; s < mask.size(); ++s) mask[s] = rng.bernoulli(scene.scatterers[s].visibility);
  return mask;
}

VirtualArrayTensor synthesize_tensor(const Scene& scene, const ArrayGeometry& geometry,
                                     const PolarGrid& grid, const SimConfig& config,
                                     const RngStream& rng) {
  check_inputs(scene, geometry, grid, config);
  const size_t num_k = geometry.num_virtual();
  const size_t num_l = grid.num_range;
  const size_t num_a = grid.num_azimuth;
  VirtualArrayTensor tensor(num_k, num_l, num_a);

  const std::vector<bool> visible = draw_visibility(scene, rng.split(kVisibilityStream));
  const RngStream noise = rng.split(kNoiseStream);
  const double spread = config.range_spread_bins * grid.range_step();

  // Range profile per visible scatterer, shared by every antenna.
  std::vector<size_t> active;
  std::vector<double> profile;
  for (size_t s = 0; s < scene.scatterers.size(); ++s) {
    if (!visible[s] || scene.scatterers[s].amplitude == 0.0) continue;
    active.push_back(s);
    for (size_t l = 0; l < num_l; ++l)
      profile.push_back(scene.scatterers[s].amplitude *
                        sinc((grid.range_at(l) - scene.scatterers[s].range) / spread));
  }
  std::vector<double> grid_sin(num_a);
  for (size_t a = 0; a < num_a; ++a) grid_sin[a] = std::sin(grid.azimuth_at(a));

  const long long k_count = static_cast<long long>(num_k);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long kk = 0; kk < k_count; ++kk) {
    const size_t k = static_cast<size_t>(kk);
    const double u = geometry.element_pos[k];
    std::vector<cd> acc(num_l * num_a, cd(0.0, 0.0));
    std::vector<cd> phasor(num_a);
    for (size_t n = 0; n < active.size(); ++n) {
      const Scatterer& sc = scene.scatterers[active[n]];
      const double base = std::numbers::pi * u * std::sin(sc.azimuth) + doppler_phase(sc, k, geometry, config);
      for (size_t a = 0; a < num_a; ++a) phasor[a] = std::polar(1.0, base - std::numbers::pi * u * grid_sin[a]);
      const double* prof = profile.data() + n * num_l;
      for (size_t l = 0; l < num_l; ++l) {
        if (prof[l] == 0.0) continue;
        cd* row = acc.data() + l * num_a;
        for (size_t a = 0; a < num_a; ++a) row[a] += prof[l] * phasor[a];
      }
    }
    auto slab = tensor.slab(k);
    for (size_t c = 0; c < slab.size(); ++c) {
      cd v = acc[c];
      if (config.noise_floor > 0.0) v += noise_sample(noise, k * slab.size() + c, config.noise_floor);
      slab[c] = {static_cast<float>(v.real()), static_cast<float>(v.imag())};
    }
  }
  return tensor;
}

Heatmap integrate_heatmap(const VirtualArrayTensor& tensor) {
  Heatmap out(tensor.num_range, tensor.num_azimuth);
  const size_t num_a = tensor.num_azimuth;
  const long long rows = static_cast<long long>(tensor.num_range);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long long ll = 0; ll < rows; ++ll) {
    const size_t l = static_cast<size_t>(ll);
    std::vector<cd> acc(num_a, cd(0.0, 0.0));
    for (size_t k = 0; k < tensor.num_virtual; ++k) {
      const std::complex<float>* src = tensor.data.data() + tensor.index(k, l, 0);
      for (size_t a = 0; a < num_a; ++a) acc[a] += cd(src[a].real(), src[a].imag());
    }
    for (size_t a = 0; a < num_a; ++a) out.at(l, a) = static_cast<float>(std::abs(acc[a]));
  }
  return out;
}

void SceneGenConfig::validate() const {
  if (scatterers_min > scatterers_max) throw ConfigError("scenes: scatterers_min > scatterers_max");
  if (!(amplitude_min >= 0.0 && amplitude_min <= amplitude_max)) throw ConfigError("scenes: bad amplitude range");
  if (!(visibility_min >= 0.0 && visibility_min <= visibility_max && visibility_max <= 1.0))
    throw ConfigError("scenes: bad visibility range");
  if (!(speed_max >= 0.0)) throw ConfigError("scenes: speed_max must be >= 0");
  if (!(edge_margin_bins >= 0.0)) throw ConfigError("scenes: edge_margin_bins must be >= 0");
  if (!(box_length > 0.0 && box_width > 0.0)) throw ConfigError("scenes: box extent must be > 0");
}

std::string scene_id(size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "scene_" + digits;
}

Scene generate_scene(size_t index, const PolarGrid& grid, const SceneGenConfig& config, const RngStream& rng) {
  grid.validate();
  config.validate();
  const double r_margin = std::min(config.edge_margin_bins * grid.range_step(), 0.45 * (grid.range_max - grid.range_min));
  const double a_margin = std::min(config.edge_margin_bins * grid.az_step(), 0.45 * (grid.az_max - grid.az_min));
  RngStream r = rng.split(index);
  Scene scene;
  scene.id = scene_id(index);
  const size_t count = config.scatterers_min + r.below(config.scatterers_max - config.scatterers_min + 1);
  for (size_t s = 0; s < count; ++s) {
    Scatterer sc;
    sc.range = r.uniform(grid.range_min + r_margin, grid.range_max - r_margin);
    sc.azimuth = r.uniform(grid.az_min + a_margin, grid.az_max - a_margin);
    sc.amplitude = r.uniform(config.amplitude_min, config.amplitude_max);
    sc.visibility = r.uniform(config.visibility_min, config.visibility_max);
    sc.radial_velocity = r.uniform(-config.speed_max, config.speed_max);
    // Heading: half straight ahead, a fifth incoming, the rest arbitrary.
    const double u = r.uniform();
    double yaw = 0.0;
    if (u >= 0.5 && u < 0.7)
      yaw = std::numbers::pi;
    else if (u >= 0.7)
      yaw = r.uniform(-std::numbers::pi, std::numbers::pi);
    const BevPoint c = polar_to_cartesian(sc.range, sc.azimuth);
    scene.boxes.push_back({c.x, c.y, config.box_length, config.box_width, yaw, std::nullopt});
    scene.scatterers.push_back(sc);
  }
  return scene;
}

namespace serial {

VirtualArrayTensor synthesize_tensor(const Scene& scene, const ArrayGeometry& geometry,
                                     const PolarGrid& grid, const SimConfig& config,
                                     const RngStream& rng) {
  check_inputs(scene, geometry, grid, config);
  VirtualArrayTensor tensor(geometry.num_virtual(), grid.num_range, grid.num_azimuth);
  const std::vector<bool> visible = draw_visibility(scene, rng.split(kVisibilityStream));
  const RngStream noise = rng.split(kNoiseStream);
  const double spread = config.range_spread_bins * grid.range_step();
  for (size_t k = 0; k < tensor.num_virtual; ++k) {
    for (size_t l = 0; l < tensor.num_range; ++l) {
      for (size_t a = 0; a < tensor.num_azimuth; ++a) {
        cd v(0.0, 0.0);
        for (size_t s = 0; s < scene.scatterers.size(); ++s) {
          if (!visible[s]) continue;
          const Scatterer& sc = scene.scatterers[s];
          const double g = sc.amplitude * sinc((grid.range_at(l) - sc.range) / spread);
          const double phase = steering_phase(geometry, k, sc.azimuth) -
                               steering_phase(geometry, k, grid.azimuth_at(a)) +
                               doppler_phase(sc, k, geometry, config);
          v += g * std::exp(cd(0.0, phase));
        }
        if (config.noise_floor > 0.0)
          v += noise_sample(noise, tensor.index(k, l, a), config.noise_floor);
        tensor.at(k, l, a) = {static_cast<float>(v.real()), static_cast<float>(v.imag())};
      }
    }
  }
  return tensor;
}

Heatmap integrate_heatmap(const VirtualArrayTensor& tensor) {
  Heatmap out(tensor.num_range, tensor.num_azimuth);
  for (size_t l = 0; l < tensor.num_range; ++l) {
    for (size_t a = 0; a < tensor.num_azimuth; ++a) {
      cd sum(0.0, 0.0);
      for (size_t k = 0; k < tensor.num_virtual; ++k) {
        const auto s = tensor.at(k, l, a);
        sum += cd(s.real(), s.imag());
      }
      out.at(l, a) = static_cast<float>(std::abs(sum));
    }
  }
  return out;
}

}  // namespace serial

}  // namespace radkit
