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

// Test of H0: C theta = 0 against C theta >= 0 (at least one row strict)
// through the E-bar-squared statistic and its beta-mixture null.

#pragma once

#include "plrs/chibar.hpp"
#include "plrs/cqp.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace plrs {

struct EbarStatistic {
  double ebar = 0.0;   // delta / (delta + rss of the unconstrained fit)
  double delta = 0.0;  // (theta_ineq - theta_eq)' X'X (theta_ineq - theta_eq)
  double lr = 0.0;     // rss(theta_eq) - rss(theta_ineq)
  FitResult inequality;
  FitResult equality;
  FitResult unconstrained;
  Eigen::Index df_residual = 0;  // n - k
};

/// Throws InputError when n <= k.
EbarStatistic ebar_statistic(const DesignSystem& D, const Vector& y);

/// Null-mixture component shapes. Test: Beta(h/2, (n-k)/2) with a point mass
/// at zero for h = 0. Band: Beta((h+1)/2, (n-k)/2), used for confidence
/// regions that include the intercept.
enum class MixtureVariant { Test, Band };

/// P(E >= e) under sum_h w(h) Beta(., df_residual / 2).
double mixture_survival(double e, const ChibarWeights& weights, Eigen::Index df_residual,
                        MixtureVariant variant);

/// p-value of an observed E-bar-squared for a design with n rows and k columns.
double mixture_pvalue(double ebar, const ChibarWeights& weights, Eigen::Index n, int k,
                      MixtureVariant variant = MixtureVariant::Test);

/// Smallest e with P(E <= e) >= prob, by bisection. Throws InputError unless
/// 0 < prob < 1.
double mixture_quantile(double prob, const ChibarWeights& weights, Eigen::Index n, int k,
                        MixtureVariant variant);

struct TestResult {
  double lr = 0.0;
  double ebar = 0.0;
  double pvalue = 1.0;
  ChibarWeights weights_used;
  Eigen::Index df_residual = 0;
};

/// Full screening test for one design: statistic, weights of its own cone and
/// metric, p-value.
TestResult plrs_test(const DesignSystem& D, const Vector& y, long n_draws, std::uint64_t seed);

/// Benjamini-Hochberg q-values, returned in input order.
std::vector<double> bh_qvalues(std::span<const double> pvalues);

struct LmTestResult {
  double slope = 0.0;
  double f = 0.0;
  double pvalue = 1.0;
};

/// Ordinary F test of intercept-only against y = b0 + b1 x.
LmTestResult lm_test(std::span<const double> x, const Vector& y);

}  // namespace plrs
