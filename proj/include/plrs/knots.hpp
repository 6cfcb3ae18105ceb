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

#include "plrs/spline_model.hpp"

#include <span>
#include <vector>

namespace plrs {

/// Raised by knots_from_calls when a lower state has a covariate value above
/// one of the next state. Carries the offending sample indices.
class OrderingError : public InputError {
public:
  OrderingError(const std::string& what, std::size_t lower_index, std::size_t upper_index)
      : InputError(what), lower_index(lower_index), upper_index(upper_index) {}
  std::size_t lower_index;
  std::size_t upper_index;
};

/// Knots at the midpoint between the largest covariate of each state and the
/// smallest covariate of the next one (hard calls).
KnotSet knots_from_calls(std::span<const double> x, std::span<const int> s);

/// Knots maximising the summed membership probability of the state each
/// sample falls in. `callprobs` is n x 4 (loss, normal, gain, amp);
/// `states` lists the contiguous states to separate. When several disjoint
/// cut intervals attain the maximum, the one closest to the hard-call
/// midpoint (argmax calls) wins; the lowest interval if that is undefined.
KnotSet knots_from_probabilities(std::span<const double> x, const Matrix& callprobs,
                                 std::span<const int> states);

/// Probability mass collected by cutting boundary `lower_state`|`lower_state+1`
/// at alpha.
double cut_objective(std::span<const double> x, const Matrix& callprobs, int lower_state,
                     double alpha);

}  // namespace plrs
