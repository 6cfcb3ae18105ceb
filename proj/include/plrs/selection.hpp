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

#include "plrs/chibar.hpp"
#include "plrs/cqp.hpp"
#include "plrs/spline_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace plrs {

enum class Criterion { OSAIC, AIC, BIC };

std::string_view to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view s);

/// One-sided AIC: -loglik + sum_h w(h) (k - p + h). Throws InputError when
/// the weights were computed for a different number of constraint rows.
double osaic(const FitResult& fit, const ChibarWeights& weights, int k);
double aic(const FitResult& fit, int k);
double bic(const FitResult& fit, int k, Eigen::Index n);

struct SubmodelScore {
  SplineSpec spec;
  FitResult fit;
  ChibarWeights weights;
  double osaic = 0.0;
  double aic = 0.0;
  double bic = 0.0;

  double score(Criterion c) const;
};

struct SelectionOptions {
  long n_draws = kScreenDraws;
  std::uint64_t seed = 1;
};

struct SelectionResult {
  std::vector<SubmodelScore> scores;  // fitted submodels in canonical mask order
  std::vector<std::string> skipped;   // submodels whose design could not be built
  std::size_t best_osaic = 0;
  std::size_t best_aic = 0;
  std::size_t best_bic = 0;

  const SubmodelScore& best(Criterion c) const;
};

/// Fits and scores every submodel of the knot set's family. Winners minimise
/// the criterion; ties go to the smaller k, then to the earlier mask.
SelectionResult select_model(std::span<const double> x, const Vector& y, const KnotSet& knots,
                             const SelectionOptions& options = {});

}  // namespace plrs
