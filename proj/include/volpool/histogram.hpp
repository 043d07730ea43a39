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
#include <span>
#include <string>
#include <vector>

namespace volpool {

/// Half-open bins [edge[i], edge[i+1]). Finite values outside every bin go to
/// `overflow`; NaN and infinities go to `non_finite`.
struct Histogram {
  std::string field_name;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t overflow = 0;
  std::size_t non_finite = 0;

  std::size_t total() const;
  /// Mean using bin midpoints, over in-range samples only.
  double midpoint_mean() const;
};

/// Throws Error unless edges are strictly ascending with at least two entries.
void check_bin_edges(std::span<const double> edges);

/// OpenMP kernel; chunked so the result is independent of the thread count.
Histogram make_histogram(std::span<const double> values, std::span<const double> edges, std::string field_name = {});

}  // namespace volpool
