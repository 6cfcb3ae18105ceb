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

// Matched expression / copy-number input. See FORMATS.md for the layouts.

#pragma once

#include "plrs/spline_model.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace plrs {

struct IngestPaths {
  std::string expr;
  std::string seg;
  std::string calls;                 // optional when probabilities are given
  std::array<std::string, 4> probs;  // loss, normal, gain, amp (all or none)
  std::string probs_long;            // alternative to `probs`
};

struct Dataset {
  std::vector<std::string> samples;
  std::vector<GeneRecord> genes;             // input order of the expression file
  std::vector<std::string> dropped_missing;  // features with a missing cell
  std::vector<std::string> unmatched;        // expression features absent from another file
  std::vector<std::string> extra_ids;        // features only present in the other files
  bool has_probabilities = false;

  const GeneRecord* find(const std::string& id) const;
  /// Position of `id` in `genes`; throws InputError for an unknown id.
  std::size_t index_of(const std::string& id) const;
};

/// Throws InputError on unreadable files, unparseable cells (with file,
/// line and column), duplicate feature IDs, or sample columns that differ in
/// name or order between files.
Dataset ingest(const IngestPaths& paths);

/// Writes the dataset back as expression, segment, call and (when present)
/// long-format probability files under `prefix` + {expr,seg,calls,probs}.tsv.
void write_dataset(const Dataset& data, const std::string& prefix);

/// Fixed "%.10g" formatting; NaN prints as NA.
std::string format_number(double v);

}  // namespace plrs
