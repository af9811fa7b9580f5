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
#include "radkit/radar_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radkit/error.hpp"

namespace radkit {

ArrayGeometry ArrayGeometry::uniform_linear(uint32_t num_tx, uint32_t num_rx) {
  ArrayGeometry g;
  g.num_tx = num_tx;
  g.num_rx = num_rx;
  const size_t k_total = static_cast<size_t>(num_tx) * num_rx;
  const double centre = (static_cast<double>(k_total) - 1.0) / 2.0;
  g.element_pos.resize(k_total);
  for (size_t k = 0; k < k_total; ++k) g.element_pos[k] = static_cast<double>(k) - centre;
  return g;
}

void ArrayGeometry::validate() const {
  if (num_tx == 0 || num_rx == 0) throw ConfigError("geometry: num_tx and num_rx must be >= 1");
  if (element_pos.size() != static_cast<size_t>(num_tx) * num_rx)
    throw ConfigError("geometry: element_pos must have num_tx * num_rx entries");
  for (double u : element_pos)
    if (!std::isfinite(u)) throw ConfigError("geometry: non-finite element position");
}

size_t PolarGrid::nearest_range_bin(double range) const {
  const double idx = std::floor((range - range_min) / range_step());
  return static_cast<size_t>(std::clamp(idx, 0.0, static_cast<double>(num_range - 1)));
}

size_t PolarGrid::nearest_azimuth_bin(double azimuth) const {
  const double idx = std::floor((azimuth - az_min) / az_step());
  return static_cast<size_t>(std::clamp(idx, 0.0, static_cast<double>(num_azimuth - 1)));
}

void PolarGrid::validate() const {
  if (num_range == 0 || num_azimuth == 0) throw ConfigError("grid: empty grid");
  if (!(range_min >= 0.0 && range_min < range_max)) throw ConfigError("grid: need 0 <= range_min < range_max");
  const double half_pi = std::numbers::pi / 2.0;
  if (!(az_min >= -half_pi && az_min < az_max && az_max <= half_pi))
    throw ConfigError("grid: need -pi/2 <= az_min < az_max <= pi/2");
}

bool VirtualArrayTensor::all_finite() const {
  return std::all_of(data.begin(), data.end(),
                     [](std::complex<float> c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

bool Heatmap::is_valid() const {
  if (data.size() != num_range * num_azimuth) return false;
  return std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v) && v >= 0.0f; });
}

BevPoint polar_to_cartesian(double range, double azimuth) {
  return {range * std::sin(azimuth), range * std::cos(azimuth)};
}

PolarPoint cartesian_to_polar(double x, double y) {
  return {std::hypot(x, y), std::atan2(x, y)};
}

ArrayGeometry default_geometry() { return ArrayGeometry::uniform_linear(3, 4); }

PolarGrid default_grid() {
  PolarGrid g;
  g.num_range = 32;
  g.num_azimuth = 32;
  g.range_min = 1.0;
  g.range_max = 33.0;
  g.az_min = -std::numbers::pi / 3.0;
  g.az_max = std::numbers::pi / 3.0;
  return g;
}

}  // namespace radkit
