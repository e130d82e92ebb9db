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

#include "metablox_tools/lawfirm.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <curl/curl.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <zlib.h>

namespace metablox::tools {

namespace {

constexpr std::uint32_t kEndOfCentralDirectory = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

std::uint32_t read_u32(std::string_view s, std::size_t at) {
  if (at + 4 > s.size()) throw std::runtime_error("zip: truncated archive");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

std::uint16_t read_u16(std::string_view s, std::size_t at) {
  if (at + 2 > s.size()) throw std::runtime_error("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw std::runtime_error("zip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) {
    throw std::runtime_error("zip: corrupt deflate stream");
  }
  return out;
}

std::size_t write_callback(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::string& find_file(const std::map<std::string, std::string>& files,
                             std::string_view name) {
  for (const auto& [k, v] : files) {
    if (lower(k) == lower(std::string(name))) return v;
  }
  throw std::runtime_error(fmt::format("law firm data: {} not found", name));
}

std::vector<std::vector<int>> parse_table(const std::string& text, std::string_view name) {
  std::vector<std::vector<int>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<int> row;
    int x = 0;
    while (ls >> x) row.push_back(x);
    if (!ls.eof()) throw std::runtime_error(fmt::format("{}: non-numeric entry", name));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

Graph symmetrized(const std::vector<std::vector<int>>& m, std::string_view name,
                  const std::vector<std::string>& names) {
  const std::size_t n = names.size();
  if (m.size() != n) {
    throw std::runtime_error(fmt::format("{}: expected {} rows, got {}", name, n, m.size()));
  }
  for (const auto& row : m) {
    if (row.size() != n) throw std::runtime_error(fmt::format("{}: ragged matrix", name));
  }
  std::vector<Edge> edges;
  std::size_t mutual = 0, one_way = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool a = m[i][j] != 0, b = m[j][i] != 0;
      if (!a && !b) continue;
      (a && b ? mutual : one_way) += 1;
      edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  spdlog::info("{}: symmetrized {} reciprocated and {} one-way ties into {} edges", name, mutual,
               one_way, edges.size());
  return Graph(n, std::move(edges), names);
}

std::string attribute_label(std::string_view attribute, int code) {
  static const std::map<std::string_view, std::vector<std::string_view>> kLabels{
      {"status", {"partner", "associate"}},
      {"gender", {"man", "woman"}},
      {"office", {"boston", "hartford", "providence"}},
      {"practice", {"litigation", "corporate"}},
      {"school", {"harvard-yale", "uconn", "other"}},
  };
  const auto& labels = kLabels.at(attribute);
  if (code >= 1 && static_cast<std::size_t>(code) <= labels.size()) {
    return std::string(labels[static_cast<std::size_t>(code - 1)]);
  }
  return fmt::format("code{}", code);
}

}  // namespace

std::string http_get(const std::string& url, long timeout_seconds) {
  CURL* curl = curl_easy_init();
  if (!curl) throw std::runtime_error("libcurl initialisation failed");
  std::string body;
  char error[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, std::min(timeout_seconds, 15L));
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, timeout_seconds);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_callback);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, error);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) {
    throw std::runtime_error(fmt::format("download of {} failed: {}", url,
                                         error[0] ? error : curl_easy_strerror(rc)));
  }
  return body;
}

std::map<std::string, std::string> unzip(std::string_view archive) {
  if (archive.size() < 22) throw std::runtime_error("zip: archive too small");
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = archive.size() > 65557 ? archive.size() - 65557 : 0;
  for (std::size_t at = archive.size() - 22 + 1; at-- > lowest;) {
    if (read_u32(archive, at) == kEndOfCentralDirectory) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw std::runtime_error("zip: no central directory");
  const std::uint16_t entries = read_u16(archive, eocd + 10);
  std::size_t at = read_u32(archive, eocd + 16);

  std::map<std::string, std::string> files;
  for (std::uint16_t e = 0; e < entries; ++e) {
    if (read_u32(archive, at) != kCentralHeader) throw std::runtime_error("zip: bad central header");
    const std::uint16_t method = read_u16(archive, at + 10);
    const std::uint32_t compressed = read_u32(archive, at + 20);
    const std::uint32_t size = read_u32(archive, at + 24);
    const std::uint16_t name_len = read_u16(archive, at + 28);
    const std::uint16_t extra_len = read_u16(archive, at + 30);
    const std::uint16_t comment_len = read_u16(archive, at + 32);
    const std::uint32_t local = read_u32(archive, at + 42);
    if (at + 46 + name_len > archive.size()) throw std::runtime_error("zip: truncated name");
    std::string name(archive.substr(at + 46, name_len));
    at += 46 + name_len + extra_len + comment_len;

    if (name.empty() || name.back() == '/') continue;
    if (read_u32(archive, local) != kLocalHeader) throw std::runtime_error("zip: bad local header");
    const std::size_t data = local + 30 + read_u16(archive, local + 26) + read_u16(archive, local + 28);
    if (data + compressed > archive.size()) throw std::runtime_error("zip: truncated entry");
    const std::string_view payload = archive.substr(data, compressed);
    std::string contents;
    if (method == 0) {
      contents.assign(payload);
    } else if (method == 8) {
      contents = inflate_raw(payload, size);
    } else {
      throw std::runtime_error(fmt::format("zip: unsupported compression method {}", method));
    }
    const auto slash = name.find_last_of('/');
    files[slash == std::string::npos ? name : name.substr(slash + 1)] = std::move(contents);
  }
  return files;
}

LawfirmData parse_lawfirm(const std::map<std::string, std::string>& files) {
  const auto attr = parse_table(find_file(files, "ELattr.dat"), "ELattr.dat");
  LawfirmData data;
  for (std::size_t i = 0; i < attr.size(); ++i) {
    if (attr[i].size() < 8) throw std::runtime_error("ELattr.dat: expected 8 columns");
    data.node_names.push_back(std::to_string(i + 1));
  }
  // Columns: seniority, status, gender, office, years, age, practice, school.
  const std::pair<std::string_view, std::size_t> columns[] = {
      {"status", 1}, {"gender", 2}, {"office", 3}, {"practice", 6}, {"school", 7}};
  for (const auto& [name, col] : columns) {
    auto& labels = data.attributes[std::string(name)];
    for (const auto& row : attr) labels.push_back(attribute_label(name, row[col]));
  }
  const std::pair<std::string_view, std::string_view> sources[] = {
      {"advice", "ELadv.dat"}, {"friendship", "ELfriend.dat"}, {"cowork", "ELwork.dat"}};
  for (const auto& [name, file] : sources) {
    data.networks.emplace(std::string(name),
                          symmetrized(parse_table(find_file(files, file), file), name,
                                      data.node_names));
  }
  return data;
}

std::map<std::string, std::string> read_dat_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || lower(entry.path().extension().string()) != ".dat") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    files[entry.path().filename().string()] = buffer.str();
  }
  return files;
}

std::vector<std::filesystem::path> write_lawfirm(const LawfirmData& data,
                                                 const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, g] : data.networks) {
    const auto path = outdir / (name + ".txt");
    std::ofstream out(path);
    write_edge_list(out, g);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  for (const auto& [name, labels] : data.attributes) {
    const auto path = outdir / (name + ".csv");
    std::ofstream out(path);
    out << "node,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << data.node_names[i] << ',' << labels[i] << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

LawfirmData read_lawfirm_outdir(const std::filesystem::path& outdir) {
  LawfirmData data;
  for (const auto attribute : kLawfirmAttributes) {
    const auto table = load_metadata_csv_file(outdir / (std::string(attribute) + ".csv"));
    std::vector<std::string> nodes, labels;
    for (const auto& [node, label] : table.rows) {
      nodes.push_back(node);
      labels.push_back(label);
    }
    if (data.node_names.empty()) data.node_names = nodes;
    if (nodes != data.node_names) {
      throw std::runtime_error("law firm metadata tables list different nodes");
    }
    data.attributes[std::string(attribute)] = std::move(labels);
  }
  for (const auto network : kLawfirmNetworks) {
    Graph g = load_edge_list_file(outdir / (std::string(network) + ".txt"));
    std::vector<std::string> missing;
    for (const auto& name : data.node_names) {
      if (!g.index_of(name)) missing.push_back(name);
    }
    g = g.with_isolated_nodes(missing);
    // Reorder to metadata node order.
    std::vector<Edge> edges;
    std::vector<NodeId> position(g.num_nodes());
    for (std::size_t i = 0; i < data.node_names.size(); ++i) {
      position[static_cast<std::size_t>(*g.index_of(data.node_names[i]))] = static_cast<NodeId>(i);
    }
    for (const Edge& e : g.edges()) {
      const NodeId u = position[static_cast<std::size_t>(e.u)];
      const NodeId v = position[static_cast<std::size_t>(e.v)];
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
    data.networks.emplace(std::string(network),
                          Graph(data.node_names.size(), std::move(edges), data.node_names));
  }
  return data;
}

}  // namespace metablox::tools
