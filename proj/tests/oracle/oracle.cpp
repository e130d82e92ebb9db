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

#include "oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace metablox::oracle {

namespace {

using Float = boost::multiprecision::cpp_bin_float_50;

BigInt factorial(std::int64_t n) {
  BigInt out = 1;
  for (std::int64_t k = 2; k <= n; ++k) out *= k;
  return out;
}

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

BigInt power(std::int64_t base, std::int64_t exp) {
  BigInt out = 1;
  for (std::int64_t k = 0; k < exp; ++k) out *= base;
  return out;
}

// (2m)!! = 2^m m!
BigInt double_factorial_even(std::int64_t x) { return power(2, x / 2) * factorial(x / 2); }

void count_rec(int remaining, int max_part, int parts_left, BigInt& total) {
  if (remaining == 0) {
    ++total;
    return;
  }
  if (parts_left == 0) return;
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    count_rec(remaining - part, part, parts_left - 1, total);
  }
}

// Running rational num/den.
struct Rational {
  BigInt num = 1;
  BigInt den = 1;
  void times(const BigInt& x) { num *= x; }
  void over(const BigInt& x) { den *= x; }
};

}  // namespace

BigInt count_restricted_partitions(int n, int m) {
  BigInt total = 0;
  count_rec(n, n, m, total);
  return total;
}

double exact_dl(const Graph& g, const std::vector<int>& labels, Variant v) {
  const auto N = static_cast<std::int64_t>(g.num_nodes());
  const auto E = static_cast<std::int64_t>(g.num_edges());
  const int B = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  std::vector<std::int64_t> n(B, 0), er(B, 0), k(N, 0);
  std::vector<std::vector<std::int64_t>> e(B, std::vector<std::int64_t>(B, 0));
  for (std::int64_t i = 0; i < N; ++i) ++n[labels[i]];
  for (const Edge& edge : g.edges()) {
    const int r = labels[edge.u], s = labels[edge.v];
    ++k[edge.u];
    ++k[edge.v];
    ++e[r][s];
    ++e[s][r];  // diagonal receives 2 per internal edge
  }
  for (int r = 0; r < B; ++r) {
    for (int s = 0; s < B; ++s) er[r] += e[r][s];
  }
  std::int64_t e_in = 0;
  for (int r = 0; r < B; ++r) e_in += e[r][r] / 2;
  const std::int64_t e_out = E - e_in;

  Rational p;
  // Likelihood numerator shared by all models.
  for (int r = 0; r < B; ++r) {
    p.times(double_factorial_even(e[r][r]));
    for (int s = r + 1; s < B; ++s) p.times(factorial(e[r][s]));
  }
  if (v == Variant::kNdc) {
    for (int r = 0; r < B; ++r) p.over(power(n[r], er[r]));
    p.over(binomial(B * (B + 1) / 2 + E - 1, E));
  } else {
    for (std::int64_t i = 0; i < N; ++i) p.times(factorial(k[i]));
    for (int r = 0; r < B; ++r) p.over(factorial(er[r]));
    // Degree sequence prior.
    for (int r = 0; r < B; ++r) {
      std::map<std::int64_t, std::int64_t> eta;
      for (std::int64_t i = 0; i < N; ++i) {
        if (labels[i] == r) ++eta[k[i]];
      }
      for (const auto& [deg, count] : eta) p.times(factorial(count));
      p.over(factorial(n[r]));
      p.over(count_restricted_partitions(static_cast<int>(er[r]), static_cast<int>(n[r])));
    }
    const BigInt pairs = binomial(B, 2);
    if (v == Variant::kDc) {
      p.over(binomial(B * (B + 1) / 2 + E - 1, E));
    } else if (v == Variant::kPpUniform) {
      p.times(factorial(e_in));
      p.times(factorial(e_out));
      p.over(power(B, e_in));
      for (int r = 0; r < B; ++r) p.over(factorial(e[r][r] / 2));
      BigInt pp = 1;
      for (std::int64_t j = 0; j < e_out; ++j) pp *= pairs;
      p.over(pp);
      for (int r = 0; r < B; ++r) {
        for (int s = r + 1; s < B; ++s) p.over(factorial(e[r][s]));
      }
      if (B > 1) p.over(E + 1);
    } else {
      p.times(factorial(e_out));
      BigInt pp = 1;
      for (std::int64_t j = 0; j < e_out; ++j) pp *= pairs;
      p.over(pp);
      for (int r = 0; r < B; ++r) {
        for (int s = r + 1; s < B; ++s) p.over(factorial(e[r][s]));
      }
      p.over(binomial(B + e_in - 1, e_in));
      if (B > 1) p.over(E + 1);
    }
  }
  // Partition prior: Π n_r! / N! · C(N−1, B−1)^{-1} · 1/N.
  for (int r = 0; r < B; ++r) p.times(factorial(n[r]));
  p.over(factorial(N));
  p.over(binomial(N - 1, B - 1));
  p.over(N);

  const Float sigma = log(Float(p.den)) - log(Float(p.num));
  return static_cast<double>(sigma);
}

void for_each_partition(int n, int max_blocks,
                        const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      visit(labels);
      return;
    }
    for (int b = 0; b <= std::min(used, max_blocks - 1); ++b) {
      labels[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) {
    visit(labels);
    return;
  }
  rec(0, 0);
}

double exhaustive_minimum(int n, const std::function<double(const std::vector<int>&)>& score) {
  double best = std::numeric_limits<double>::infinity();
  for_each_partition(n, n, [&](const std::vector<int>& labels) {
    best = std::min(best, score(labels));
  });
  return best;
}

}  // namespace metablox::oracle
