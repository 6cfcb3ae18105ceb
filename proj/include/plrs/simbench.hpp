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

// Simulation studies: slope estimation bias/variance, simultaneous band
// coverage, test power by effect shape, and synthetic screening corpora.
// Every table is a deterministic function of its options.

#pragma once

#include "plrs/chibar.hpp"
#include "plrs/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace plrs {

// Slope estimation. Two-state model (normal, gain) with the knot fixed at
// 0.5:
//   model 1: y = 1 + a2 (x - 0.5)_+
//   model 2: y = 1 + 0.5 x + (a2 - 0.5) (x - 0.5)_+
// The estimand is the gain-segment slope a2: theta_1 for the linear fit,
// theta_1 + theta_{1,1} for the piecewise fit. One x design per model,
// x ~ U(0, 1), is drawn from the seed and reused by every cell.

struct PointEstimationOptions {
  std::vector<int> models{1, 2};
  std::vector<double> a2{0.0, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> sigma{0.1, 0.25, 0.5, 0.75, 1.0};
  int n = 80;
  int reps = 1000;
  bool constrained = true;  // false: ordinary least squares for both fits
  bool continuous = false;  // piecewise fit without the jump term: 1, x, (x - 0.5)_+
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PointEstimationCell {
  int model = 1;
  double a2 = 0.0;
  double sigma = 0.0;
  bool constrained = true;
  bool continuous = false;
  int reps = 0;
  double bias2_linear = 0.0;
  double var_linear = 0.0;
  double bias2_piecewise = 0.0;
  double var_piecewise = 0.0;
};

std::vector<PointEstimationCell> sim_point_estimation(const PointEstimationOptions& options);

/// The fixed design used for `model`.
std::vector<double> point_estimation_design(const PointEstimationOptions& options, int model);

// Band coverage. y = 1 + (x - 0.5)^0_+ + (x - 0.5)^1_+ + sigma e with
// x ~ U(0, 1) drawn per data set, knot fixed at 0.5. A replicate covers when
// the true curve lies inside the band at every point of an equidistant grid
// over [min x, max x].

struct CoverageOptions {
  std::vector<int> n{20, 40, 80};
  std::vector<double> sigma{0.5, 1.0};
  std::vector<double> alpha{0.05, 0.1};
  int reps = 2000;
  int grid = 10;
  long mc_draws = kScreenDraws;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CoverageCell {
  int n = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  int reps = 0;
  long covered = 0;
  long redrawn = 0;  // designs redrawn because the spline was not identifiable
  double coverage() const { return reps > 0 ? static_cast<double>(covered) / reps : 0.0; }
};

std::vector<CoverageCell> sim_coverage(const CoverageOptions& options);

/// The true mean function of the coverage study.
double coverage_truth(double x);

// Test power by effect shape. States are drawn with probabilities
// (loss, normal, gain) = (0.2, 0.5, 0.3) and copy number from disjoint
// ranges per state; the normal/gain boundary sits at x = 0.2.
//   null:   y = e
//   linear: y = b x + e
//   level:  y = b 1{gain} + e
//   partial: y = b (x - 0.2)_+ + e   (slope in the gain state only)

enum class Shape { Null, Linear, PiecewiseLevel, Partial };

std::string_view to_string(Shape s);
Shape parse_shape(std::string_view s);  // throws InputError

struct ShapeOptions {
  std::vector<Shape> shapes{Shape::Null, Shape::Linear, Shape::PiecewiseLevel, Shape::Partial};
  std::vector<double> effects{0.5, 1.0, 2.0};
  std::vector<double> alpha{0.01, 0.05, 0.1};
  int n = 80;
  double sigma = 1.0;
  int reps = 500;
  int min_obs_per_state = 5;
  long mc_draws = kScreenDraws;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ShapeCell {
  Shape shape = Shape::Null;
  double effect = 0.0;
  double alpha = 0.0;
  int reps = 0;
  long untested = 0;  // cone test could not run; counted as not rejected
  long rejected_plrs = 0;
  long rejected_lm = 0;
  double power_plrs() const { return reps > 0 ? static_cast<double>(rejected_plrs) / reps : 0.0; }
  double power_lm() const { return reps > 0 ? static_cast<double>(rejected_lm) / reps : 0.0; }
};

/// Per-replicate p-values of one (shape, effect) group. p_plrs is NaN when
/// the cone test could not run; w0 is the weight of the h = 0 component
/// (the probability mass the null puts on p = 1).
struct ShapeReplicates {
  Shape shape = Shape::Null;
  double effect = 0.0;
  std::vector<double> p_plrs;
  std::vector<double> p_lm;
  std::vector<double> w0;
  std::vector<int> states;  // segments of the tested model
};

std::vector<ShapeReplicates> sim_shape_pvalues(const ShapeOptions& options);

/// Rejection rates at each alpha of `options`.
std::vector<ShapeCell> sim_test_shapes(const ShapeOptions& options);

// Synthetic screening corpus with known model classes.

struct CorpusOptions {
  int genes = 500;
  int samples = 60;
  double sigma = 0.5;
  std::uint64_t seed = 1;
};

struct Corpus {
  Dataset data;  // hard calls and call probabilities
  std::vector<ModelClass> truth;
};

Corpus sim_corpus(const CorpusOptions& options);

void write_point_table(std::ostream& out, const std::vector<PointEstimationCell>& cells);
void write_coverage_table(std::ostream& out, const std::vector<CoverageCell>& cells);
void write_shape_table(std::ostream& out, const std::vector<ShapeCell>& cells);
void write_corpus_truth(std::ostream& out, const Corpus& corpus);

}  // namespace plrs
