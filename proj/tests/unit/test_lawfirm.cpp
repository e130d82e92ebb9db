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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <zlib.h>

#include "metablox_tools/lawfirm.hpp"

namespace metablox::tools {
namespace {

namespace fs = std::filesystem;

void put16(std::string& s, unsigned v) {
  s += static_cast<char>(v & 0xff);
  s += static_cast<char>((v >> 8) & 0xff);
}

void put32(std::string& s, std::uint32_t v) {
  put16(s, v & 0xffff);
  put16(s, v >> 16);
}

std::string deflate_raw(const std::string& data) {
  z_stream zs{};
  deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

// Minimal zip writer: odd entries stored, even entries deflated.
std::string make_zip(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string body, central;
  int k = 0;
  for (const auto& [name, data] : entries) {
    const bool deflated = (k++ % 2) == 0;
    const std::string payload = deflated ? deflate_raw(data) : data;
    const auto crc = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    const auto offset = static_cast<std::uint32_t>(body.size());
    put32(body, 0x04034b50);
    put16(body, 20);
    put16(body, 0);
    put16(body, deflated ? 8 : 0);
    put32(body, 0);
    put32(body, crc);
    put32(body, static_cast<std::uint32_t>(payload.size()));
    put32(body, static_cast<std::uint32_t>(data.size()));
    put16(body, static_cast<unsigned>(name.size()));
    put16(body, 0);
    body += name + payload;

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, deflated ? 8 : 0);
    put32(central, 0);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put32(central, static_cast<std::uint32_t>(data.size()));
    put16(central, static_cast<unsigned>(name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central += name;
  }
  std::string zip = body + central;
  put32(zip, 0x06054b50);
  put16(zip, 0);
  put16(zip, 0);
  put16(zip, static_cast<unsigned>(entries.size()));
  put16(zip, static_cast<unsigned>(entries.size()));
  put32(zip, static_cast<std::uint32_t>(central.size()));
  put32(zip, static_cast<std::uint32_t>(body.size()));
  put16(zip, 0);
  return zip;
}

// Four lawyers; node 4 has no ties in the advice network.
std::map<std::string, std::string> sample_files() {
  return {
      {"ELadv.dat", "0 1 0 0\n0 0 1 0\n1 0 0 0\n0 0 0 0\n"},
      {"ELfriend.dat", "0 1 0 0\n1 0 0 0\n0 0 0 1\n0 0 0 0\n"},
      {"ELwork.dat", "0 1 1 1\n1 0 1 1\n1 1 0 1\n1 1 1 0\n"},
      {"ELattr.dat",
       "1 1 1 1 31 64 1 1\n2 1 1 1 32 62 2 1\n3 2 2 2 13 67 1 3\n4 2 1 3 31 59 2 2\n"},
  };
}

TEST(Unzip, StoredAndDeflatedEntries) {
  const std::string big(5000, 'x');
  const std::string zip = make_zip({{"dir/a.txt", "hello"}, {"b.dat", big}, {"dir/", ""}});
  const auto files = unzip(zip);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files.at("a.txt"), "hello");
  EXPECT_EQ(files.at("b.dat"), big);
}

TEST(Unzip, RejectsGarbage) {
  EXPECT_THROW(unzip("not a zip file at all, definitely not"), std::runtime_error);
  std::string zip = make_zip({{"a", "abc"}});
  zip[2] = 'X';
  EXPECT_THROW(unzip(zip), std::runtime_error);
}

TEST(Lawfirm, ParsesAndSymmetrizes) {
  const LawfirmData data = parse_lawfirm(sample_files());
  EXPECT_EQ(data.node_names, (std::vector<std::string>{"1", "2", "3", "4"}));
  const Graph& advice = data.networks.at("advice");
  EXPECT_EQ(advice.num_nodes(), 4u);
  EXPECT_EQ(advice.num_edges(), 3u);
  EXPECT_EQ(advice.degree(3), 0);
  EXPECT_EQ(data.networks.at("friendship").num_edges(), 2u);
  EXPECT_EQ(data.networks.at("cowork").num_edges(), 6u);
  EXPECT_EQ(data.attributes.size(), 5u);
  EXPECT_EQ(data.attributes.at("status"),
            (std::vector<std::string>{"partner", "partner", "associate", "associate"}));
  EXPECT_EQ(data.attributes.at("office"),
            (std::vector<std::string>{"boston", "boston", "hartford", "providence"}));
  EXPECT_EQ(data.attributes.at("practice"),
            (std::vector<std::string>{"litigation", "corporate", "litigation", "corporate"}));
  EXPECT_EQ(data.attributes.at("school"),
            (std::vector<std::string>{"harvard-yale", "harvard-yale", "other", "uconn"}));
  EXPECT_EQ(data.attributes.at("gender"),
            (std::vector<std::string>{"man", "man", "woman", "man"}));
}

TEST(Lawfirm, RejectsMalformedTables) {
  auto files = sample_files();
  files["ELadv.dat"] = "0 1\n1 0\n";
  EXPECT_THROW(parse_lawfirm(files), std::runtime_error);
  files = sample_files();
  files.erase("ELwork.dat");
  EXPECT_THROW(parse_lawfirm(files), std::runtime_error);
  files = sample_files();
  files["ELattr.dat"] = "1 2 3\n";
  EXPECT_THROW(parse_lawfirm(files), std::runtime_error);
}

TEST(Lawfirm, ZipRoundTripThroughOutputDirectory) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [name, text] : sample_files()) entries.emplace_back("LazegaLawyers/" + name, text);
  const LawfirmData data = parse_lawfirm(unzip(make_zip(entries)));
  const fs::path dir = fs::temp_directory_path() / "metablox_lawfirm_test";
  fs::remove_all(dir);
  const auto written = write_lawfirm(data, dir);
  EXPECT_EQ(written.size(), 8u);
  for (const auto attribute : kLawfirmAttributes) {
    EXPECT_TRUE(fs::exists(dir / (std::string(attribute) + ".csv")));
  }
  const LawfirmData back = read_lawfirm_outdir(dir);
  EXPECT_EQ(back.node_names, data.node_names);
  for (const auto& [name, g] : data.networks) {
    const Graph& h = back.networks.at(name);
    EXPECT_EQ(h.num_nodes(), g.num_nodes()) << name;
    EXPECT_TRUE(std::equal(g.edges().begin(), g.edges().end(), h.edges().begin(), h.edges().end()))
        << name;
  }
  EXPECT_EQ(back.attributes, data.attributes);
  fs::remove_all(dir);
}

TEST(Lawfirm, OfflineDownloadFailsCleanly) {
  EXPECT_THROW(http_get("http://127.0.0.1:9/LazegaLawyers.zip", 5), std::runtime_error);
}

}  // namespace
}  // namespace metablox::tools
