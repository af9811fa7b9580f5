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
#ifndef RADKIT_RADAR_MODEL_HPP_
#define RADKIT_RADAR_MODEL_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radkit {

// BEV convention used everywhere: x is lateral, y is forward (boresight),
// azimuth and yaw are measured from +y towards +x.

/// MIMO virtual array. Element k = tx * num_rx + rx sits at element_pos[k],
/// in half-wavelength units.
struct ArrayGeometry {
  uint32_t num_tx = 0;
  uint32_t num_rx = 0;
  std::vector<double> element_pos;

  size_t num_virtual() const { return element_pos.size(); }
  uint32_t tx_index(size_t k) const { return static_cast<uint32_t>(k / num_rx); }

  /// Uniform linear virtual array: receivers at half-wavelength spacing,
  /// transmitters spaced by the receive aperture, centred on zero.
  static ArrayGeometry uniform_linear(uint32_t num_tx, uint32_t num_rx);
  void validate() const;
};

/// Range-azimuth grid; samples sit at cell centres.
struct PolarGrid {
  uint32_t num_range = 0;
  uint32_t num_azimuth = 0;
  double range_min = 0.0;
  double range_max = 0.0;
  double az_min = 0.0;
  double az_max = 0.0;

  double range_step() const { return (range_max - range_min) / num_range; }
  double az_step() const { return (az_max - az_min) / num_azimuth; }
  double range_at(size_t l) const { return range_min + (static_cast<double>(l) + 0.5) * range_step(); }
  double azimuth_at(size_t a) const { return az_min + (static_cast<double>(a) + 0.5) * az_step(); }
  bool contains(double range, double azimuth) const {
    return range >= range_min && range <= range_max && azimuth >= az_min && azimuth <= az_max;
  }
  /// Cell whose centre is nearest, clamped to the grid.
  size_t nearest_range_bin(double range) const;
  size_t nearest_azimuth_bin(double azimuth) const;
  void validate() const;
};

struct Scatterer {
  double range = 0.0;
  double azimuth = 0.0;
  double amplitude = 1.0;
  double visibility = 1.0;
  double radial_velocity = 0.0;
};

/// Oriented BEV box. Length runs along the heading (yaw), width across it.
struct RotatedBox {
  double cx = 0.0;
  double cy = 0.0;
  double length = 1.0;
  double width = 1.0;
  double yaw = 0.0;
  std::optional<double> score;
};

struct Scene {
  std::string id;
  std::vector<Scatterer> scatterers;
  std::vector<RotatedBox> boxes;
};

/// Complex K x L x A tensor, k-major then range then azimuth, so each
/// antenna's slab is one contiguous run of L*A samples.
struct VirtualArrayTensor {
  size_t num_virtual = 0;
  size_t num_range = 0;
  size_t num_azimuth = 0;
  std::vector<std::complex<float>> data;

  VirtualArrayTensor() = default;
  VirtualArrayTensor(size_t k, size_t l, size_t a)
      : num_virtual(k), num_range(l), num_azimuth(a), data(k * l * a) {}

  size_t slab_size() const { return num_range * num_azimuth; }
  size_t index(size_t k, size_t l, size_t a) const { return (k * num_range + l) * num_azimuth + a; }
  std::complex<float>& at(size_t k, size_t l, size_t a) { return data[index(k, l, a)]; }
  const std::complex<float>& at(size_t k, size_t l, size_t a) const { return data[index(k, l, a)]; }
  std::span<std::complex<float>> slab(size_t k) { return {data.data() + k * slab_size(), slab_size()}; }
  std::span<const std::complex<float>> slab(size_t k) const {
    return {data.data() + k * slab_size(), slab_size()};
  }
  bool all_finite() const;
};

/// Real L x A range-azimuth magnitude map, range-major.
struct Heatmap {
  size_t num_range = 0;
  size_t num_azimuth = 0;
  std::vector<float> data;

  Heatmap() = default;
  Heatmap(size_t l, size_t a) : num_range(l), num_azimuth(a), data(l * a, 0.0f) {}

  size_t size() const { return data.size(); }
  float& at(size_t l, size_t a) { return data[l * num_azimuth + a]; }
  float at(size_t l, size_t a) const { return data[l * num_azimuth + a]; }
  bool same_shape(const Heatmap& other) const {
    return num_range == other.num_range && num_azimuth == other.num_azimuth;
  }
  bool is_valid() const;
};

struct BevPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PolarPoint {
  double range = 0.0;
  double azimuth = 0.0;
};

BevPoint polar_to_cartesian(double range, double azimuth);
PolarPoint cartesian_to_polar(double x, double y);

/// Default front-facing sensor used by the CLI and the desk-scale pipeline.
ArrayGeometry default_geometry();
PolarGrid default_grid();

}  // namespace radkit

#endif  // RADKIT_RADAR_MODEL_HPP_
