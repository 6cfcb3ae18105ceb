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

#include "plrs/inference.hpp"

#include "plrs/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace plrs {

EbarStatistic ebar_statistic(const DesignSystem& D, const Vector& y) {
  const Eigen::Index n = D.X.rows(), k = D.X.cols();
  if (n <= k)
    throw InputError("E-bar-squared needs more observations (" + std::to_string(n) +
                     ") than coefficients (" + std::to_string(k) + ")");
  EbarStatistic st;
  st.unconstrained = fit_unconstrained(D, y);
  st.inequality = fit_inequality(D, y);
  st.equality = fit_equality(D, y);
  st.df_residual = n - k;
  const Vector diff = st.inequality.theta - st.equality.theta;
  st.delta = diff.dot(D.gram * diff);
  st.lr = st.equality.rss - st.inequality.rss;
  // The two constrained fits coincide when the active rows span the row
  // space of C; quantities below the roundoff floor of ||y||^2 are zero.
  const double floor = 1e-24 * std::max(y.squaredNorm(), std::numeric_limits<double>::min());
  int rank_c = 0;
  if (D.C.rows() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(D.C);
    qr.setThreshold(1e-10);
    rank_c = static_cast<int>(qr.rank());
  }
  if (st.inequality.active_rank == rank_c || st.delta <= floor) {
    st.delta = 0.0;
    st.lr = 0.0;
  }
  const double rss = st.unconstrained.rss <= floor ? 0.0 : st.unconstrained.rss;
  const double denom = st.delta + rss;
  st.ebar = denom > 0.0 ? std::clamp(st.delta / denom, 0.0, 1.0) : 0.0;
  return st;
}

double mixture_survival(double e, const ChibarWeights& weights, Eigen::Index df_residual,
                        MixtureVariant variant) {
  if (df_residual < 1) throw InputError("beta mixture needs positive residual degrees of freedom");
  if (e <= 0.0) return 1.0;  // exact, not a rounded sum of the weights
  const double b = 0.5 * static_cast<double>(df_residual);
  double total = 0.0;
  for (int h = 0; h <= weights.p; ++h) {
    const double w = weights.w(h);
    if (w == 0.0) continue;
    const double a = variant == MixtureVariant::Test ? 0.5 * h : 0.5 * (h + 1);
    if (a > 0.0) total += w * beta_survival(a, b, e);  // a == 0 is the point mass at zero
  }
  return std::clamp(total, 0.0, 1.0);
}

double mixture_pvalue(double ebar, const ChibarWeights& weights, Eigen::Index n, int k,
                      MixtureVariant variant) {
  if (n <= k) throw InputError("mixture p-value needs n > k");
  return mixture_survival(ebar, weights, n - k, variant);
}

double mixture_quantile(double prob, const ChibarWeights& weights, Eigen::Index n, int k,
                        MixtureVariant variant) {
  if (!(prob > 0.0 && prob < 1.0))
    throw InputError("mixture quantile level must lie strictly between 0 and 1");
  if (n <= k) throw InputError("mixture quantile needs n > k");
  const double tail = 1.0 - prob;
  // survival is nonincreasing on [0, 1]; find the smallest e with S(e) <= tail.
  double lo = 0.0, hi = 1.0;
  if (mixture_survival(std::nextafter(0.0, 1.0), weights, n - k, variant) <= tail) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_survival(mid, weights, n - k, variant) <= tail)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

TestResult plrs_test(const DesignSystem& D, const Vector& y, long n_draws, std::uint64_t seed) {
  const auto st = ebar_statistic(D, y);
  TestResult out;
  out.lr = st.lr;
  out.ebar = st.ebar;
  out.df_residual = st.df_residual;
  out.weights_used = chibar_weights(D.C, D.gram, n_draws, seed);
  out.pvalue = mixture_pvalue(st.ebar, out.weights_used, D.X.rows(),
                              static_cast<int>(D.X.cols()), MixtureVariant::Test);
  return out;
}

std::vector<double> bh_qvalues(std::span<const double> pvalues) {
  const std::size_t m = pvalues.size();
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("p-values must be finite and lie in [0, 1]");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double candidate = static_cast<double>(m) * pvalues[order[r]] / static_cast<double>(r + 1);
    running = std::min(running, candidate);
    q[order[r]] = std::min(running, 1.0);
  }
  return q;
}

LmTestResult lm_test(std::span<const double> x, const Vector& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n != y.size()) throw InputError("covariate and response lengths differ");
  if (n < 3) throw InputError("linear-model test needs at least 3 observations");
  const Eigen::Map<const Vector> xv(x.data(), n);
  const double xbar = xv.mean(), ybar = y.mean();
  const double sxx = (xv.array() - xbar).square().sum();
  LmTestResult out;
  if (sxx <= 0.0) return out;
  const double sxy = ((xv.array() - xbar) * (y.array() - ybar)).sum();
  out.slope = sxy / sxx;
  const double tss = (y.array() - ybar).square().sum();
  const double rss = std::max(0.0, tss - out.slope * sxy);
  const double df = static_cast<double>(n - 2);
  if (rss <= 0.0) {
    out.f = std::numeric_limits<double>::infinity();
    out.pvalue = tss > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.f = (tss - rss) / (rss / df);
  out.pvalue = f_survival(out.f, 1.0, df);
  return out;
}

}  // namespace plrs
