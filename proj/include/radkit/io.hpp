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
#ifndef RADKIT_IO_HPP_
#define RADKIT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "radkit/radar_model.hpp"

namespace radkit {

// Binary layouts (all integers and floats little-endian):
//   tensor  "RST1" u32 K u32 L u32 A, then K*L*A (f32 re, f32 im), k-major
//   heatmap "HMP1" u32 L u32 A, then L*A f32

void write_tensor(const VirtualArrayTensor& tensor, const std::filesystem::path& path);
VirtualArrayTensor read_tensor(const std::filesystem::path& path);

void write_heatmap(const Heatmap& heatmap, const std::filesystem::path& path);
Heatmap read_heatmap(const std::filesystem::path& path);

std::vector<uint8_t> encode_tensor(const VirtualArrayTensor& tensor);
VirtualArrayTensor decode_tensor(std::span<const uint8_t> bytes);
std::vector<uint8_t> encode_heatmap(const Heatmap& heatmap);
Heatmap decode_heatmap(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const uint8_t> bytes);
/// First four bytes of a file, or empty when shorter.
std::string peek_magic(const std::filesystem::path& path);

/// Little-endian byte sink used by every binary format in the project.
class ByteWriter {
 public:
  void magic(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }
  void u32(uint32_t v);
  void u64(uint64_t v);
  void f32(float v);
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

/// Little-endian cursor that reports the byte offset of any failure.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
  void expect_magic(std::string_view tag);
  uint32_t u32();
  uint64_t u64();
  float f32();
  /// Throws TruncationError unless at least n bytes remain.
  void require(uint64_t n) const;
  /// Throws FormatError if unread bytes remain.
  void expect_end() const;
  uint64_t offset() const { return offset_; }
  uint64_t remaining() const { return bytes_.size() - offset_; }

 private:
  std::span<const uint8_t> bytes_;
  uint64_t offset_ = 0;
};

// JSON forms. Field names match the domain types exactly.
void to_json(nlohmann::json& j, const Scatterer& s);
void from_json(const nlohmann::json& j, Scatterer& s);
void to_json(nlohmann::json& j, const RotatedBox& b);
void from_json(const nlohmann::json& j, RotatedBox& b);
void to_json(nlohmann::json& j, const Scene& s);
void from_json(const nlohmann::json& j, Scene& s);
void to_json(nlohmann::json& j, const ArrayGeometry& g);
void from_json(const nlohmann::json& j, ArrayGeometry& g);
void to_json(nlohmann::json& j, const PolarGrid& g);
void from_json(const nlohmann::json& j, PolarGrid& g);

void write_scene(const Scene& scene, const std::filesystem::path& path);
Scene read_scene(const std::filesystem::path& path);

/// Parses a JSON document, converting parse failures into DataError with
/// the file name and line.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace radkit

#endif  // RADKIT_IO_HPP_
