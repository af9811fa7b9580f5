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
#include "radkit/io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

#include "radkit/error.hpp"

namespace radkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kTensorMagic = "RST1";
constexpr std::string_view kHeatmapMagic = "HMP1";

// Element count for a payload of `dims` with `bytes_per` bytes each, or
// DimensionError when the product cannot be addressed.
uint64_t checked_payload(std::initializer_list<uint64_t> dims, uint64_t bytes_per, uint64_t offset) {
  uint64_t count = 1;
  for (uint64_t d : dims) {
    if (d != 0 && count > std::numeric_limits<uint64_t>::max() / d)
      throw DimensionError("declared dimensions overflow", offset);
    count *= d;
  }
  if (count > std::numeric_limits<uint64_t>::max() / bytes_per ||
      count * bytes_per > static_cast<uint64_t>(std::numeric_limits<std::ptrdiff_t>::max()))
    throw DimensionError("declared dimensions overflow", offset);
  return count;
}

}  // namespace

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<uint32_t>(v)); }

void ByteReader::require(uint64_t n) const {
  if (remaining() < n)
    throw TruncationError("truncated payload: need " + std::to_string(n) + " bytes, have " +
                              std::to_string(remaining()),
                          offset_);
}

void ByteReader::expect_magic(std::string_view tag) {
  if (remaining() < tag.size())
    throw FormatError("missing magic '" + std::string(tag) + "'", offset_);
  for (size_t i = 0; i < tag.size(); ++i) {
    if (bytes_[offset_ + i] != static_cast<uint8_t>(tag[i]))
      throw FormatError("bad magic, expected '" + std::string(tag) + "'", offset_);
  }
  offset_ += tag.size();
}

uint32_t ByteReader::u32() {
  require(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[offset_ + i]) << (8 * i);
  offset_ += 4;
  return v;
}

uint64_t ByteReader::u64() {
  require(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes_[offset_ + i]) << (8 * i);
  offset_ += 8;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

void ByteReader::expect_end() const {
  if (remaining() != 0) throw FormatError(std::to_string(remaining()) + " trailing bytes", offset_);
}

std::vector<uint8_t> encode_tensor(const VirtualArrayTensor& t) {
  ByteWriter w;
  w.magic(kTensorMagic);
  w.u32(static_cast<uint32_t>(t.num_virtual));
  w.u32(static_cast<uint32_t>(t.num_range));
  w.u32(static_cast<uint32_t>(t.num_azimuth));
  w.bytes().reserve(16 + t.data.size() * 8);
  for (const auto& c : t.data) {
    w.f32(c.real());
    w.f32(c.imag());
  }
  return std::move(w.bytes());
}

VirtualArrayTensor decode_tensor(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kTensorMagic);
  const uint64_t header_end = 16;
  const uint32_t k = r.u32();
  const uint32_t l = r.u32();
  const uint32_t a = r.u32();
  const uint64_t count = checked_payload({k, l, a}, 8, header_end);
  r.require(count * 8);
  VirtualArrayTensor t(k, l, a);
  for (auto& c : t.data) {
    const float re = r.f32();
    const float im = r.f32();
    c = {re, im};
  }
  r.expect_end();
  return t;
}

std::vector<uint8_t> encode_heatmap(const Heatmap& h) {
  ByteWriter w;
  w.magic(kHeatmapMagic);
  w.u32(static_cast<uint32_t>(h.num_range));
  w.u32(static_cast<uint32_t>(h.num_azimuth));
  for (float v : h.data) w.f32(v);
  return std::move(w.bytes());
}

Heatmap decode_heatmap(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kHeatmapMagic);
  const uint32_t l = r.u32();
  const uint32_t a = r.u32();
  const uint64_t count = checked_payload({l, a}, 4, 12);
  r.require(count * 4);
  Heatmap h(l, a);
  for (auto& v : h.data) v = r.f32();
  r.expect_end();
  return h;
}

std::vector<uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading", 0);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoFailure("read failed on '" + path.string() + "'", bytes.size());
  return bytes;
}

void write_file_bytes(const fs::path& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing", 0);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write failed on '" + path.string() + "'", 0);
}

std::string peek_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char buf[4];
  if (!in.read(buf, 4)) return {};
  return std::string(buf, 4);
}

void write_tensor(const VirtualArrayTensor& tensor, const fs::path& path) {
  write_file_bytes(path, encode_tensor(tensor));
}

VirtualArrayTensor read_tensor(const fs::path& path) { return decode_tensor(read_file_bytes(path)); }

void write_heatmap(const Heatmap& heatmap, const fs::path& path) {
  write_file_bytes(path, encode_heatmap(heatmap));
}

Heatmap read_heatmap(const fs::path& path) { return decode_heatmap(read_file_bytes(path)); }

void to_json(json& j, const Scatterer& s) {
  j = json{{"range", s.range},
           {"azimuth", s.azimuth},
           {"amplitude", s.amplitude},
           {"visibility", s.visibility},
           {"radial_velocity", s.radial_velocity}};
}

void from_json(const json& j, Scatterer& s) {
  j.at("range").get_to(s.range);
  j.at("azimuth").get_to(s.azimuth);
  j.at("amplitude").get_to(s.amplitude);
  s.visibility = j.value("visibility", 1.0);
  s.radial_velocity = j.value("radial_velocity", 0.0);
  if (s.amplitude < 0.0) throw DataError("scatterer amplitude must be >= 0");
  if (s.visibility < 0.0 || s.visibility > 1.0) throw DataError("scatterer visibility must be in [0, 1]");
}

void to_json(json& j, const RotatedBox& b) {
  j = json{{"cx", b.cx}, {"cy", b.cy}, {"length", b.length}, {"width", b.width}, {"yaw", b.yaw}};
  if (b.score) j["score"] = *b.score;
}

void from_json(const json& j, RotatedBox& b) {
  j.at("cx").get_to(b.cx);
  j.at("cy").get_to(b.cy);
  j.at("length").get_to(b.length);
  j.at("width").get_to(b.width);
  j.at("yaw").get_to(b.yaw);
  if (j.contains("score") && !j.at("score").is_null())
    b.score = j.at("score").get<double>();
  else
    b.score.reset();
}

void to_json(json& j, const Scene& s) {
  j = json{{"id", s.id}, {"scatterers", s.scatterers}, {"boxes", s.boxes}};
}

void from_json(const json& j, Scene& s) {
  j.at("id").get_to(s.id);
  if (s.id.empty()) throw DataError("scene id must be nonempty");
  j.at("scatterers").get_to(s.scatterers);
  s.boxes = j.value("boxes", std::vector<RotatedBox>{});
}

void to_json(json& j, const ArrayGeometry& g) {
  j = json{{"num_tx", g.num_tx}, {"num_rx", g.num_rx}, {"element_pos", g.element_pos}};
}

void from_json(const json& j, ArrayGeometry& g) {
  j.at("num_tx").get_to(g.num_tx);
  j.at("num_rx").get_to(g.num_rx);
  if (j.contains("element_pos"))
    j.at("element_pos").get_to(g.element_pos);
  else
    g.element_pos = ArrayGeometry::uniform_linear(g.num_tx, g.num_rx).element_pos;
}

void to_json(json& j, const PolarGrid& g) {
  j = json{{"num_range", g.num_range}, {"num_azimuth", g.num_azimuth}, {"range_min", g.range_min},
           {"range_max", g.range_max}, {"az_min", g.az_min},           {"az_max", g.az_max}};
}

void from_json(const json& j, PolarGrid& g) {
  j.at("num_range").get_to(g.num_range);
  j.at("num_azimuth").get_to(g.num_azimuth);
  j.at("range_min").get_to(g.range_min);
  j.at("range_max").get_to(g.range_max);
  j.at("az_min").get_to(g.az_min);
  j.at("az_max").get_to(g.az_max);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open '" + path.string() + "' for reading", 0);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // Recover the line number from the byte position for the diagnostic.
    std::ifstream again(path, std::ios::binary);
    size_t line = 1;
    char c;
    for (size_t i = 0; i + 1 < e.byte && again.get(c); ++i)
      if (c == '\n') ++line;
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_json_file(const json& doc, const fs::path& path) {
  const std::string text = doc.dump(2) + "\n";
  write_file_bytes(path, std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

void write_scene(const Scene& scene, const fs::path& path) { write_json_file(json(scene), path); }

Scene read_scene(const fs::path& path) {
  const json doc = read_json_file(path);
  try {
    return doc.get<Scene>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace radkit
