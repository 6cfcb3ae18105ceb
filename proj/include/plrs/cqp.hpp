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

#pragma once

#include "plrs/cone_qp.hpp"
#include "plrs/spline_model.hpp"

#include <vector>

namespace plrs {

/// Least-squares fit of one design under no, inequality or equality constraints.
struct FitResult {
  Vector theta;
  double rss = 0.0;
  std::vector<int> active;  // constraint rows holding with equality
  int active_rank = 0;
  double loglik = 0.0;      // Gaussian log-likelihood with sigma^2 profiled out
  double kkt_residual = 0.0;
  Vector multipliers;
  Eigen::Index n = 0;
};

/// -(n/2) (log(2 pi rss / n) + 1).
double profile_loglik(double rss, Eigen::Index n);

FitResult fit_unconstrained(const DesignSystem& D, const Vector& y);

/// min ||y - X theta||^2 subject to C theta >= 0.
FitResult fit_inequality(const DesignSystem& D, const Vector& y, const QpTolerances& tol = {});

/// min ||y - X theta||^2 subject to C theta = 0. Throws SolverError if C is
/// rank deficient.
FitResult fit_equality(const DesignSystem& D, const Vector& y);

struct ConeProjection {
  Vector point;
  int active_count = 0;  // rank of the active rows (their count when C has full row rank)
  std::vector<int> active;
};

/// argmin over {C theta >= 0} of (theta - z)' gram (theta - z).
ConeProjection project_cone(const Vector& z, const Matrix& gram, const Matrix& C,
                            const QpTolerances& tol = {});

}  // namespace plrs
