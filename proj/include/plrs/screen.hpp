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

// Genome-wide screen: knots, model selection, the cone test against the
// intercept-only null, a linear-model comparison test, and BH q-values.

#pragma once

#include "plrs/config.hpp"
#include "plrs/dataset.hpp"
#include "plrs/inference.hpp"
#include "plrs/selection.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plrs {

/// Knots by the configured method (1: hard calls, 2: call probabilities).
KnotSet estimate_knots(const GeneRecord& gene, int method);

struct GeneAnalysis {
  KnotSet knots;        // as estimated
  KnotSet model_knots;  // after merging segments below min_obs_per_state_model
  bool merged_model = false;
  SelectionResult selection;
  KnotSet test_knots;   // after merging segments below min_obs_per_state_test
  bool merged_test = false;
  std::optional<TestResult> test;
  std::string test_note;  // why the test was not run
  LmTestResult lm;
};

/// Throws InputError or SolverError; the screen quarantines such genes.
GeneAnalysis analyze_gene(const GeneRecord& gene, const Config& config, std::uint64_t seed);

/// Per-gene stream seed.
std::uint64_t gene_seed(const Config& config, std::size_t gene_index);

struct ScreenRow {
  std::string gene_id;
  Eigen::Index n = 0;
  std::vector<int> states;  // one label per model segment
  std::vector<double> knots;
  bool merged = false;
  std::array<ModelClass, 3> classes{};  // winners under osaic, aic, bic
  std::string model;                    // mask of the winner under the configured criterion
  double osaic = 0.0, aic = 0.0, bic = 0.0;
  Vector coefficients;  // canonical positions, NaN where excluded
  double ebar = std::numeric_limits<double>::quiet_NaN();
  double pvalue = std::numeric_limits<double>::quiet_NaN();
  double qvalue = std::numeric_limits<double>::quiet_NaN();
  double lm_slope = std::numeric_limits<double>::quiet_NaN();
  double lm_pvalue = std::numeric_limits<double>::quiet_NaN();
  double lm_qvalue = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> flags;
};

struct Reject {
  std::string gene_id;
  std::string stage;  // ingest, input or solver
  std::string reason;
};

struct ScreenSummary {
  std::array<std::array<long, 4>, 3> selected{};  // [criterion][model class]
  long tested = 0;
  long discoveries_full = 0;    // q < threshold, intercept versus full cone model
  long lm_tested = 0;
  long discoveries_linear = 0;  // q < threshold, intercept versus simple linear
  long rows = 0;
  long rejects = 0;
  double fdr_threshold = 0.1;

  friend bool operator==(const ScreenSummary&, const ScreenSummary&) = default;
};

struct ScreenResult {
  std::vector<ScreenRow> rows;  // input order
  std::vector<Reject> rejects;  // input order
  ScreenSummary summary;
  long input_genes = 0;
  bool all_failed_in_solver = false;
};

ScreenResult screen(const Dataset& data, const Config& config);

ScreenSummary summarize(const std::vector<ScreenRow>& rows, long rejects, double fdr_threshold);

void write_rows(std::ostream& out, const std::vector<ScreenRow>& rows);
void write_rejects(std::ostream& out, const std::vector<Reject>& rejects);
void write_summary(std::ostream& out, const ScreenSummary& summary, bool audit_consistent);

/// Recomputes the summary from a written rows file.
ScreenSummary summarize_rows_file(const std::string& path, long rejects, double fdr_threshold);

/// Plain-text tables of selection counts and discoveries.
std::string render_summary(const ScreenSummary& summary);

}  // namespace plrs
