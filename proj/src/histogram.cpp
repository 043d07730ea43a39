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

#include "volpool/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "volpool/error.hpp"
#include "volpool/parallel.hpp"

namespace volpool {

std::size_t Histogram::total() const {
  std::size_t n = overflow + non_finite;
  for (auto c : counts) n += c;
  return n;
}

double Histogram::midpoint_mean() const {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += static_cast<double>(counts[i]) * 0.5 * (bin_edges[i] + bin_edges[i + 1]);
    n += counts[i];
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

void check_bin_edges(std::span<const double> edges) {
  require(edges.size() >= 2, "histogram needs at least two bin edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    require(std::isfinite(edges[i]), "histogram bin edges must be finite");
    if (i > 0) require(edges[i] > edges[i - 1], "histogram bin edges must be strictly ascending");
  }
}

Histogram make_histogram(std::span<const double> values, std::span<const double> edges, std::string field_name) {
  check_bin_edges(edges);
  const std::size_t nbins = edges.size() - 1;
  // Partial layout: [bin counts..., overflow, non_finite].
  auto partials = parallel::map_chunks<std::vector<std::size_t>>(values.size(), [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> local(nbins + 2, 0);
    for (std::size_t i = b; i < e; ++i) {
      const double v = values[i];
      if (!std::isfinite(v)) {
        ++local[nbins + 1];
        continue;
      }
      if (v < edges.front() || v >= edges.back()) {
        ++local[nbins];
        continue;
      }
      auto it = std::upper_bound(edges.begin(), edges.end(), v);
      ++local[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    return local;
  });

  Histogram h;
  h.field_name = std::move(field_name);
  h.bin_edges.assign(edges.begin(), edges.end());
  h.counts.assign(nbins, 0);
  for (const auto& p : partials) {
    for (std::size_t k = 0; k < nbins; ++k) h.counts[k] += p[k];
    h.overflow += p[nbins];
    h.non_finite += p[nbins + 1];
  }
  return h;
}

}  // namespace volpool
