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

// Reference implementations used only by tests: description lengths from
// exact rational probabilities, brute-force integer partition counts and
// exhaustive set-partition enumeration.

#ifndef METABLOX_TESTS_ORACLE_HPP_
#define METABLOX_TESTS_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"

namespace metablox::oracle {

using BigInt = boost::multiprecision::cpp_int;

/// Number of partitions of n into at most m positive parts, by enumeration.
BigInt count_restricted_partitions(int n, int m);

/// −ln P(A, θ, b) where P is assembled as an exact rational from the
/// likelihood and prior formulas of each model; only the final logarithm
/// is inexact (50 significant digits).
double exact_dl(const Graph& g, const std::vector<int>& labels, Variant v);

/// Calls `visit` with every set partition of {0..n-1} with at most
/// `max_blocks` blocks, as restricted growth strings.
void for_each_partition(int n, int max_blocks,
                        const std::function<void(const std::vector<int>&)>& visit);

/// Minimum of `score` over all set partitions of {0..n-1}.
double exhaustive_minimum(int n, const std::function<double(const std::vector<int>&)>& score);

}  // namespace metablox::oracle

#endif  // METABLOX_TESTS_ORACLE_HPP_
