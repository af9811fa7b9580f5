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
#ifndef RADKIT_ERROR_HPP_
#define RADKIT_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace radkit {

// Error classes map onto the CLI exit codes: ConfigError -> 2,
// DataError (and the file errors below) -> 3, NumericalError -> 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary file failure carrying the byte offset at which it was detected.
class FileError : public DataError {
 public:
  FileError(const std::string& what, uint64_t offset)
      : DataError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

class IoFailure : public FileError {
 public:
  using FileError::FileError;
};

/// Wrong magic or version tag.
class FormatError : public FileError {
 public:
  using FileError::FileError;
};

/// Declared dimensions overflow the addressable size.
class DimensionError : public FileError {
 public:
  using FileError::FileError;
};

/// Payload shorter than the header declares.
class TruncationError : public FileError {
 public:
  using FileError::FileError;
};

}  // namespace radkit

#endif  // RADKIT_ERROR_HPP_
