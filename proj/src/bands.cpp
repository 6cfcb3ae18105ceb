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

#include "plrs/bands.hpp"

#include "plrs/cqp.hpp"
#include "plrs/inference.hpp"

#include <algorithm>

namespace plrs {

RegionParams region_params(const DesignSystem& D, const Vector& y, const ChibarWeights& weights,
                           double alpha) {
  const Eigen::Index n = D.X.rows();
  const auto k = static_cast<int>(D.X.cols());
  if (n <= k) throw InputError("confidence region needs n > k");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie strictly between 0 and 1");
  RegionParams r;
  r.center = fit_inequality(D, y).theta;
  r.rss_unconstrained = fit_unconstrained(D, y).rss;
  Eigen::LLT<Matrix> llt(D.gram);
  if (llt.info() != Eigen::Success) throw SolverError("gram matrix is singular");
  r.M = llt.matrixU();
  r.quantile = mixture_quantile(1.0 - alpha, weights, n, k, MixtureVariant::Band);
  r.lambda = r.quantile >= 1.0 ? std::numeric_limits<double>::infinity()
                               : r.rss_unconstrained * r.quantile / (1.0 - r.quantile);
  return r;
}

BandInterval band_at(const Vector& xrow, const Vector& center, const Matrix& M, double lambda,
                     const Matrix& C, const BarrierOptions& options) {
  BandInterval out;
  out.lower = minimize_over_region<double>(xrow, center, M, lambda, C, options);
  out.upper = minimize_over_region<double>(-xrow, center, M, lambda, C, options);
  out.lo = out.lower.dual_bound;
  out.hi = -out.upper.dual_bound;
  return out;
}

BandGrid band_grid(const KnotSet& knots, std::span<const double> x, const Vector& y,
                   const ChibarWeights& weights, double alpha, int n_points,
                   std::span<const double> grid) {
  const auto spec = SplineSpec::full(knots);
  const auto D = build_design(x, spec);
  const auto region = region_params(D, y, weights, alpha);

  BandGrid out;
  out.level = 1.0 - alpha;
  out.lambda = region.lambda;
  if (!grid.empty()) {
    out.xs.assign(grid.begin(), grid.end());
    std::sort(out.xs.begin(), out.xs.end());
  } else {
    if (n_points < 2) throw InputError("band grid needs at least two points");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (int i = 0; i < n_points; ++i)
      out.xs.push_back(*lo + (*hi - *lo) * i / (n_points - 1));
  }
  const auto m = static_cast<Eigen::Index>(out.xs.size());
  out.fitted.resize(m);
  out.lower.resize(m);
  out.upper.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector row = basis_row(knots, out.xs[i]);
    const auto band = band_at(row, region.center, region.M, region.lambda, D.C);
    out.fitted(i) = row.dot(region.center);
    out.lower(i) = band.lo;
    out.upper(i) = band.hi;
  }
  return out;
}

}  // namespace plrs
