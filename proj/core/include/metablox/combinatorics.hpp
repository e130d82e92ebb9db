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

#ifndef METABLOX_COMBINATORICS_HPP_
#define METABLOX_COMBINATORICS_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <vector>

namespace metablox {

// All quantities are natural logarithms (nats).

/// ln(n!). Table lookup for small n, lgamma above.
double log_factorial(std::int64_t n);

/// ln C(n, k); throws std::domain_error unless 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

/// ln of the multiset coefficient ((n k)) = C(n + k - 1, k); n >= 1, k >= 0.
double log_multiset(std::int64_t n, std::int64_t k);

/// ln(x!!) for even x >= 0, i.e. (x/2) ln 2 + ln((x/2)!).
double log_double_factorial_even(std::int64_t x);

/// Asymptotic estimate of ln q(n, m) used beyond the exact range. It is
/// min(ln p_HR(n), ln[C(n-1, m'-1) / m'!]) with m' = min(m, m*(n)) where m*
/// is the largest m with m^2 + m <= n and p_HR the Hardy-Ramanujan estimate of
/// the partition function. Both pieces are nondecreasing in n and m.
double log_q_approx(std::int64_t n, std::int64_t m);

/// Memoized ln q(n, m), the number of partitions of n into at most m parts.
///
/// For m >= n/2 the value is evaluated exactly in big-integer arithmetic via
/// q(n, m) = p(n) - sum_{i < n - m} p(i). Smaller m comes from a
/// double-precision table filled by q(n, m) = q(n, m - 1) + q(n - m, m),
/// which only adds positive terms (relative error below n * 2^-52).
/// Arguments with n > exact_cap fall back to log_q_approx and are counted.
///
/// Lookups are lock-free against an immutable snapshot; growing the table
/// takes a mutex and publishes a new snapshot.
class QTable {
 public:
  static constexpr std::int64_t kDefaultExactCap = 10000;

  explicit QTable(std::int64_t exact_cap = kDefaultExactCap);
  ~QTable();
  QTable(const QTable&) = delete;
  QTable& operator=(const QTable&) = delete;

  double log_q(std::int64_t n, std::int64_t m) const;

  /// Precomputes every (n, m) with n <= n_max, m <= m_max.
  void reserve(std::int64_t n_max, std::int64_t m_max) const;

  std::int64_t exact_cap() const { return exact_cap_; }
  std::int64_t n_capacity() const;
  std::int64_t m_capacity() const;
  std::uint64_t fallback_count() const { return fallbacks_.load(); }

  /// Binary cache: "MBXQ" magic, u32 version, u64 exact_cap, u64 n_max,
  /// u64 m_max (all little-endian), then the table payload. Loading a missing
  /// or mismatched file returns false and leaves the table unchanged.
  bool save(const std::filesystem::path& path) const;
  bool load(const std::filesystem::path& path);

  /// Process-wide instance with the default cap. If the environment variable
  /// METABLOX_CACHE_DIR is set, a cache file there is read on first use.
  static const QTable& shared();

 private:
  struct Snapshot;
  const Snapshot* ensure(std::int64_t n, std::int64_t m) const;

  std::int64_t exact_cap_;
  mutable std::atomic<const Snapshot*> current_;
  mutable std::mutex grow_mutex_;
  mutable std::vector<std::unique_ptr<Snapshot>> snapshots_;
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

/// Convenience wrapper over QTable::shared().
double log_q(std::int64_t n, std::int64_t m);

}  // namespace metablox

#endif  // METABLOX_COMBINATORICS_HPP_
