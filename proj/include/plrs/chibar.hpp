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

// Level probabilities of the cone {C theta >= 0} under the metric G = X'X.
//
// w(h) is the probability that the G-metric projection of z ~ N(0, G^-1)
// onto the cone leaves h of the p inequality rows slack, i.e. lands on a face
// of dimension k - p + h.

#pragma once

#include "plrs/types.hpp"

#include <cstdint>

namespace plrs {

struct ChibarWeights {
  int p = 0;                // number of inequality rows
  Vector w = Vector::Ones(1);  // w(h), h = 0..p
  long n_draws = 0;
  double mc_se = 0.0;       // largest binomial standard error over the entries
  bool exact = true;

  /// Expected face dimension sum_h w(h) (k - p + h).
  double expected_dimension(int k) const;
};

inline constexpr long kScreenDraws = 10'000;
inline constexpr long kAcceptanceDraws = 100'000;

/// Closed forms for p <= 2. Throws InputError for p > 2 or when the two
/// constraint rows are collinear in the metric.
ChibarWeights weights_exact_small(const Matrix& C, const Matrix& gram);

/// Monte Carlo estimate with `n_draws` projections. Bit-for-bit reproducible
/// for fixed (C, gram, n_draws, seed).
ChibarWeights weights_mc(const Matrix& C, const Matrix& gram, long n_draws, std::uint64_t seed);

/// weights_exact_small when it applies, weights_mc otherwise.
ChibarWeights chibar_weights(const Matrix& C, const Matrix& gram, long n_draws,
                             std::uint64_t seed);

}  // namespace plrs
