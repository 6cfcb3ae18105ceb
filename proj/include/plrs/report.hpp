// Copyright 2026 The plrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-gene band tables and SVG plots.

#pragma once

#include "plrs/bands.hpp"
#include "plrs/config.hpp"
#include "plrs/selection.hpp"

#include <cstdint>
#include <iosfwd>

namespace plrs {

struct GeneBands {
  KnotSet knots;  // model knots (after merging sparse segments)
  BandGrid grid;  // full-model region
  SplineSpec selected;
  Vector selected_theta;
  std::vector<int> grid_states;  // state label of the segment holding each grid x
};

GeneBands gene_bands(const GeneRecord& gene, const Config& config, std::uint64_t seed);

/// Columns: x, fitted, lower, upper, state.
void write_bands_tsv(std::ostream& out, const GeneBands& bands);

/// Scatter of the observations by call, grey band, full-model fit (dashed)
/// and the selected model (solid).
void write_bands_svg(std::ostream& out, const GeneRecord& gene, const GeneBands& bands);

}  // namespace plrs
