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

#include "metablox/combinatorics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <spdlog/spdlog.h>

namespace metablox {

namespace {

constexpr std::int64_t kFactorialTableSize = 1 << 16;

const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kFactorialTableSize);
    t[0] = 0.0;
    for (std::int64_t n = 1; n < kFactorialTableSize; ++n) {
      t[static_cast<std::size_t>(n)] = std::lgamma(static_cast<double>(n) + 1.0);
    }
    return t;
  }();
  return table;
}

using BigInt = boost::multiprecision::cpp_int;

double log_big(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log of non-positive integer");
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 62) return std::log(static_cast<double>(static_cast<std::uint64_t>(x)));
  const auto shift = bits - 62;
  const auto top = static_cast<std::uint64_t>(x >> shift);
  return std::log(static_cast<double>(top)) +
         static_cast<double>(shift) * std::numbers::ln2;
}

// Hardy-Ramanujan estimate of ln p(n).
double log_p_hardy_ramanujan(double n) {
  return std::numbers::pi * std::sqrt(2.0 * n / 3.0) -
         std::log(4.0 * n * std::sqrt(3.0));
}

}  // namespace

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial of negative number");
  if (n < kFactorialTableSize) return factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::domain_error("log_binomial requires 0 <= k <= n (n=" +
                            std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_multiset(std::int64_t n, std::int64_t k) {
  if (n < 1) throw std::domain_error("log_multiset requires n >= 1");
  if (k < 0) throw std::domain_error("log_multiset requires k >= 0");
  return log_binomial(n + k - 1, k);
}

double log_double_factorial_even(std::int64_t x) {
  if (x < 0 || x % 2 != 0) {
    throw std::domain_error("log_double_factorial_even requires even x >= 0");
  }
  return static_cast<double>(x / 2) * std::numbers::ln2 + log_factorial(x / 2);
}

double log_q_approx(std::int64_t n, std::int64_t m) {
  if (n < 0 || m < 1) throw std::domain_error("log_q_approx requires n >= 0, m >= 1");
  if (n <= 1 || m == 1) return 0.0;
  m = std::min(m, n);
  const auto nd = static_cast<double>(n);
  const double hr = log_p_hardy_ramanujan(nd);

  // Erdos-Lehner: the largest part of a uniform random partition is
  // Gumbel-distributed around sqrt(6n)/(2 pi) ln n.
  const double scale = std::sqrt(6.0 * nd) / std::numbers::pi;
  const double erdos_lehner = hr - scale * std::exp(-static_cast<double>(m) / scale);

  // Lower bound C(n-1, m-1) / m! (compositions into m parts, each partition
  // counted at most m! times), used where it is increasing in m.
  auto m_star = static_cast<std::int64_t>(std::floor((std::sqrt(1.0 + 4.0 * nd) - 1.0) / 2.0));
  while ((m_star + 1) * (m_star + 2) <= n) ++m_star;
  while (m_star * (m_star + 1) > n) --m_star;
  const std::int64_t m_low = std::max<std::int64_t>(1, std::min(m, m_star));
  const double lower = log_binomial(n - 1, m_low - 1) - log_factorial(m_low);

  return std::min(hr, std::max(lower, erdos_lehner));
}

// ---------------------------------------------------------------------------
// QTable

struct QTable::Snapshot {
  std::int64_t n_max = 0;
  std::int64_t m_max = 0;
  std::vector<double> log_p;       // ln p(n), n in [0, n_max]
  std::vector<double> log_prefix;  // ln sum_{i <= n} p(i)
  std::vector<std::size_t> offset; // row start of n in `table`
  std::vector<double> table;       // ln q(n, m) for 1 <= m <= row_len(n)

  std::int64_t row_len(std::int64_t n) const {
    return n < 1 ? 0 : std::min(m_max, (n - 1) / 2);
  }

  void build_offsets() {
    offset.assign(static_cast<std::size_t>(n_max) + 2, 0);
    for (std::int64_t n = 0; n <= n_max; ++n) {
      offset[static_cast<std::size_t>(n) + 1] =
          offset[static_cast<std::size_t>(n)] + static_cast<std::size_t>(row_len(n));
    }
  }

  static std::unique_ptr<Snapshot> build(std::int64_t n_max, std::int64_t m_max) {
    auto s = std::make_unique<Snapshot>();
    s->n_max = n_max;
    s->m_max = m_max;

    // Exact partition numbers via Euler's pentagonal recurrence.
    std::vector<BigInt> p(static_cast<std::size_t>(n_max) + 1);
    p[0] = 1;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      BigInt acc = 0;
      for (std::int64_t k = 1;; ++k) {
        const std::int64_t g1 = k * (3 * k - 1) / 2;
        if (g1 > n) break;
        const bool add = (k % 2) == 1;
        const std::int64_t g2 = k * (3 * k + 1) / 2;
        if (add) {
          acc += p[static_cast<std::size_t>(n - g1)];
          if (g2 <= n) acc += p[static_cast<std::size_t>(n - g2)];
        } else {
          acc -= p[static_cast<std::size_t>(n - g1)];
          if (g2 <= n) acc -= p[static_cast<std::size_t>(n - g2)];
        }
      }
      p[static_cast<std::size_t>(n)] = acc;
    }
    s->log_p.resize(p.size());
    s->log_prefix.resize(p.size());
    BigInt prefix = 0;
    for (std::size_t n = 0; n < p.size(); ++n) {
      prefix += p[n];
      s->log_p[n] = log_big(p[n]);
      s->log_prefix[n] = log_big(prefix);
    }

    s->build_offsets();
    s->table.resize(s->offset.back());
    const std::int64_t columns = std::min(m_max, std::max<std::int64_t>(0, (n_max - 1) / 2));
    std::vector<double> cur(static_cast<std::size_t>(n_max) + 1, 0.0);
    cur[0] = 1.0;
    for (std::int64_t m = 1; m <= columns; ++m) {
      for (std::int64_t n = m; n <= n_max; ++n) {
        cur[static_cast<std::size_t>(n)] += cur[static_cast<std::size_t>(n - m)];
      }
      for (std::int64_t n = 2 * m + 1; n <= n_max; ++n) {
        if (m > s->row_len(n)) continue;
        s->table[s->offset[static_cast<std::size_t>(n)] + static_cast<std::size_t>(m - 1)] =
            std::log(cur[static_cast<std::size_t>(n)]);
      }
    }
    return s;
  }

  double lookup(std::int64_t n, std::int64_t m) const {
    if (m >= n) return log_p[static_cast<std::size_t>(n)];
    if (2 * m >= n) {
      // q(n, m) = p(n) - sum_{i <= n-m-1} p(i): each partition with j > m >= n/2
      // parts maps to a partition of n - j with at most j parts.
      const double lp = log_p[static_cast<std::size_t>(n)];
      const double ls = log_prefix[static_cast<std::size_t>(n - m - 1)];
      return lp + std::log1p(-std::exp(ls - lp));
    }
    return table[offset[static_cast<std::size_t>(n)] + static_cast<std::size_t>(m - 1)];
  }

  bool covers(std::int64_t n, std::int64_t m) const {
    if (n > n_max) return false;
    return 2 * m >= n || m <= m_max;
  }
};

namespace {
// Caps the size of a single table snapshot (doubles).
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 26;
constexpr std::int64_t kHardExactCap = 50000;
}  // namespace

QTable::QTable(std::int64_t exact_cap)
    : exact_cap_(std::clamp<std::int64_t>(exact_cap, 0, kHardExactCap)) {
  if (exact_cap > kHardExactCap) {
    spdlog::warn("QTable: exact cap {} exceeds double range; clamped to {}", exact_cap,
                 kHardExactCap);
  }
  std::lock_guard lock(grow_mutex_);
  snapshots_.push_back(Snapshot::build(std::min<std::int64_t>(64, exact_cap_), 32));
  current_.store(snapshots_.back().get(), std::memory_order_release);
}

QTable::~QTable() = default;

std::int64_t QTable::n_capacity() const { return current_.load()->n_max; }
std::int64_t QTable::m_capacity() const { return current_.load()->m_max; }

const QTable::Snapshot* QTable::ensure(std::int64_t n, std::int64_t m) const {
  std::lock_guard lock(grow_mutex_);
  const Snapshot* cur = current_.load(std::memory_order_acquire);
  if (cur->covers(n, m)) return cur;
  std::int64_t n_max = std::max(cur->n_max, n);
  std::int64_t m_max = std::max(cur->m_max, std::min(m, (n - 1) / 2));
  if (n_max > cur->n_max) n_max = std::min(exact_cap_, std::max(n_max, cur->n_max * 3 / 2));
  if (m_max > cur->m_max) m_max = std::max(m_max, cur->m_max * 3 / 2);
  m_max = std::min(m_max, std::max<std::int64_t>(1, n_max / 2));
  const auto entries = static_cast<std::size_t>(n_max) * static_cast<std::size_t>(std::min(m_max, n_max / 2 + 1));
  if (entries > kMaxTableEntries) {
    spdlog::warn("QTable: table for n<={}, m<={} would exceed the memory budget", n_max,
                 m_max);
  }
  snapshots_.push_back(Snapshot::build(n_max, m_max));
  current_.store(snapshots_.back().get(), std::memory_order_release);
  return snapshots_.back().get();
}

void QTable::reserve(std::int64_t n_max, std::int64_t m_max) const {
  n_max = std::min(n_max, exact_cap_);
  if (n_max < 1) return;
  m_max = std::max<std::int64_t>(1, std::min(m_max, n_max));
  const Snapshot* cur = current_.load(std::memory_order_acquire);
  if (cur->n_max >= n_max && cur->m_max >= std::min(m_max, (n_max - 1) / 2)) return;
  ensure(n_max, std::max<std::int64_t>(1, std::min(m_max, (n_max - 1) / 2)));
}

double QTable::log_q(std::int64_t n, std::int64_t m) const {
  if (n < 0 || m < 1) {
    throw std::domain_error("log_q requires n >= 0 and m >= 1");
  }
  if (n <= 1 || m == 1) return 0.0;
  if (n > exact_cap_) {
    if (fallbacks_.fetch_add(1) == 0) {
      spdlog::warn("QTable: n={} beyond exact cap {}; using asymptotic q(n, m)", n,
                   exact_cap_);
    }
    return log_q_approx(n, m);
  }
  const Snapshot* s = current_.load(std::memory_order_acquire);
  if (!s->covers(n, m)) s = ensure(n, m);
  return s->lookup(n, m);
}

namespace {
constexpr std::array<char, 4> kMagic{'M', 'B', 'X', 'Q'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "cache IO assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_le(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}
}  // namespace

bool QTable::save(const std::filesystem::path& path) const {
  const Snapshot* s = current_.load(std::memory_order_acquire);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kCacheVersion);
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(exact_cap_));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(s->n_max));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(s->m_max));
  auto dump = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(s->log_p);
  dump(s->log_prefix);
  dump(s->table);
  return static_cast<bool>(out);
}

bool QTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::array<char, 4> magic{};
  std::uint32_t version = 0;
  std::uint64_t cap = 0, n_max = 0, m_max = 0;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return false;
  if (!read_le(in, version) || version != kCacheVersion) return false;
  if (!read_le(in, cap) || !read_le(in, n_max) || !read_le(in, m_max)) return false;
  if (static_cast<std::int64_t>(cap) != exact_cap_ ||
      static_cast<std::int64_t>(n_max) > exact_cap_ || m_max > n_max + 1) {
    return false;
  }
  auto s = std::make_unique<Snapshot>();
  s->n_max = static_cast<std::int64_t>(n_max);
  s->m_max = static_cast<std::int64_t>(m_max);
  s->build_offsets();
  s->log_p.resize(n_max + 1);
  s->log_prefix.resize(n_max + 1);
  s->table.resize(s->offset.back());
  auto slurp = [&](std::vector<double>& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(v.data()),
                                     static_cast<std::streamsize>(v.size() * sizeof(double))));
  };
  if (!slurp(s->log_p) || !slurp(s->log_prefix) || !slurp(s->table)) return false;

  std::lock_guard lock(grow_mutex_);
  const Snapshot* cur = current_.load(std::memory_order_acquire);
  if (s->n_max < cur->n_max || s->m_max < cur->m_max) return true;
  snapshots_.push_back(std::move(s));
  current_.store(snapshots_.back().get(), std::memory_order_release);
  return true;
}

const QTable& QTable::shared() {
  static QTable* table = [] {
    auto* t = new QTable();
    if (const char* dir = std::getenv("METABLOX_CACHE_DIR"); dir && *dir) {
      const auto path = std::filesystem::path(dir) / "qtable-v1.bin";
      if (t->load(path)) spdlog::debug("QTable: loaded cache {}", path.string());
    }
    return t;
  }();
  return *table;
}

double log_q(std::int64_t n, std::int64_t m) { return QTable::shared().log_q(n, m); }

}  // namespace metablox
