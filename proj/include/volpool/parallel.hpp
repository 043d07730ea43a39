// Copyright 2026 The volpool Authors
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

#pragma once

#include <cstddef>
#include <vector>

namespace volpool::parallel {

/// Fixed partition size. Chunk boundaries never depend on the thread count,
/// so merging the partials in chunk order gives bit-identical results.
inline constexpr std::size_t kChunk = 4096;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunk) { return (n + chunk - 1) / chunk; }

/// Evaluates fn(begin, end) for each chunk of [0, n) in parallel; partials are
/// returned in chunk order.
template <class T, class Fn>
std::vector<T> map_chunks(std::size_t n, Fn&& fn, std::size_t chunk = kChunk) {
  const std::size_t nchunks = chunk_count(n, chunk);
  std::vector<T> partials(nchunks);
  const auto count = static_cast<long long>(nchunks);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    partials[static_cast<std::size_t>(c)] = fn(begin, end);
  }
  return partials;
}

/// Deterministic parallel sum of term(i) over [0, n).
template <class Term>
double sum(std::size_t n, Term&& term) {
  auto partials = map_chunks<double>(n, [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += term(i);
    return acc;
  });
  double total = 0.0;
  for (double p : partials) total += p;
  return total;
}

}  // namespace volpool::parallel
