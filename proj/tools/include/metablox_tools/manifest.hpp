// Copyright 2026 The metablox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef METABLOX_TOOLS_MANIFEST_HPP_
#define METABLOX_TOOLS_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace metablox::tools {

inline constexpr std::string_view kVersion = "0.1.0";

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
/// Throws std::runtime_error if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// Provenance record written next to command outputs. Reports themselves
/// carry no timestamps so that reruns stay byte-identical.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::vector<InputDigest> inputs;
  std::optional<std::uint64_t> seed;
  std::string version{kVersion};
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  void add_input(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Writes pretty-printed JSON; throws std::runtime_error on I/O failure.
  void write(const std::filesystem::path& path) const;
};

/// Writes `contents` to `path`, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace metablox::tools

#endif  // METABLOX_TOOLS_MANIFEST_HPP_
