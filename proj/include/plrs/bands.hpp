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

// Uniform confidence bands from the joint region
//
//   { theta : ||M (theta - theta_ineq)||^2 <= lambda,  C theta >= 0 },
//
// which is the set where the E-bar-squared statistic centred at theta stays
// below its (1 - alpha) band-mixture quantile Q, with M'M = X'X and
// lambda = rss_unconstrained * Q / (1 - Q).

#pragma once

#include "plrs/chibar.hpp"
#include "plrs/conic_barrier.hpp"
#include "plrs/spline_model.hpp"

#include <span>
#include <vector>

namespace plrs {

struct RegionParams {
  Vector center;  // inequality-constrained estimate
  Matrix M;       // upper triangular, M'M = X'X
  double lambda = 0.0;
  double quantile = 0.0;
  double rss_unconstrained = 0.0;
};

/// Throws InputError when n <= k or alpha is outside (0, 1).
RegionParams region_params(const DesignSystem& D, const Vector& y, const ChibarWeights& weights,
                           double alpha);

struct BandInterval {
  double lo = 0.0;  // certified: lo <= inf over the region
  double hi = 0.0;  // certified: hi >= sup over the region
  BarrierSolution<double> lower;
  BarrierSolution<double> upper;
};

/// Range of xrow' theta over the region. `xrow` is the design row of the
/// point (restricted to the columns of C and M).
BandInterval band_at(const Vector& xrow, const Vector& center, const Matrix& M, double lambda,
                     const Matrix& C, const BarrierOptions& options = {});

struct BandGrid {
  std::vector<double> xs;
  Vector fitted;  // full-model constrained fit
  Vector lower;
  Vector upper;
  double level = 0.95;
  double lambda = 0.0;
};

/// Band over `n_points` equispaced values spanning [min x, max x] (or over
/// `grid` when given), computed on the full model of `knots`.
BandGrid band_grid(const KnotSet& knots, std::span<const double> x, const Vector& y,
                   const ChibarWeights& weights, double alpha, int n_points = 100,
                   std::span<const double> grid = {});

}  // namespace plrs
