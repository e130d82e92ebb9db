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

#ifndef METABLOX_TOOLS_LAWFIRM_HPP_
#define METABLOX_TOOLS_LAWFIRM_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metablox/graph.hpp"

namespace metablox::tools {

/// Archive with ELadv.dat, ELfriend.dat, ELwork.dat (N×N 0/1 matrices,
/// directed nominations for advice and friendship) and ELattr.dat.
inline constexpr std::string_view kLawfirmUrl =
    "https://www.stats.ox.ac.uk/~snijders/siena/LazegaLawyers.zip";

inline constexpr std::string_view kLawfirmNetworks[] = {"advice", "friendship", "cowork"};
inline constexpr std::string_view kLawfirmAttributes[] = {"status", "gender", "office",
                                                          "practice", "school"};

struct LawfirmData {
  /// Node names "1".."N" (the seniority rank used as id in the source).
  std::vector<std::string> node_names;
  /// Undirected simple graphs on all N nodes.
  std::map<std::string, Graph, std::less<>> networks;
  /// One label per node, in node order.
  std::map<std::string, std::vector<std::string>, std::less<>> attributes;
};

/// GET with libcurl; throws std::runtime_error on any transport or HTTP error.
std::string http_get(const std::string& url, long timeout_seconds = 120);

/// Entries of a zip archive (stored or deflated) keyed by base file name.
/// Throws std::runtime_error on a malformed archive.
std::map<std::string, std::string> unzip(std::string_view archive);

/// Builds the data set from the raw .dat files. Directed nominations are
/// symmetrized (an edge wherever either direction is present).
LawfirmData parse_lawfirm(const std::map<std::string, std::string>& files);

/// Reads the .dat files from a directory.
std::map<std::string, std::string> read_dat_dir(const std::filesystem::path& dir);

/// Writes <network>.txt edge lists and <attribute>.csv metadata tables.
/// Returns the written paths.
std::vector<std::filesystem::path> write_lawfirm(const LawfirmData& data,
                                                 const std::filesystem::path& outdir);

/// Reads the output of write_lawfirm back; isolated nodes listed in the
/// metadata are restored. Throws if files are missing.
LawfirmData read_lawfirm_outdir(const std::filesystem::path& outdir);

}  // namespace metablox::tools

#endif  // METABLOX_TOOLS_LAWFIRM_HPP_
