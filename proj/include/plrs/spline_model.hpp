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

#include "plrs/types.hpp"

#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace plrs {

/// Copy-number call codes: loss, normal, gain, amplification.
inline constexpr int kLoss = -1;
inline constexpr int kNormal = 0;
inline constexpr int kGain = 1;
inline constexpr int kAmp = 2;
inline constexpr int kNumCallStates = 4;

/// Column of a call-probability matrix holding state `s`.
constexpr int callprob_column(int s) { return s - kLoss; }

std::string_view state_name(int s);

/// Matched observations of one feature across samples.
struct GeneRecord {
  std::string id;
  std::vector<std::string> sample_ids;
  Vector y;                         // expression, log2
  Vector x;                         // segmented copy number, log2 ratio
  std::vector<int> s;               // called states in {-1, 0, 1, 2}
  std::optional<Matrix> callprobs;  // n x 4, columns loss/normal/gain/amp

  Eigen::Index size() const { return y.size(); }

  /// Throws InputError on length mismatch, bad codes or non-normalised
  /// probability rows.
  void validate() const;

  /// Sorted distinct called states. Throws InputError when they are not a
  /// contiguous run of codes.
  std::vector<int> states_present() const;
};

/// A run of consecutive call states modelled by one spline segment.
struct Segment {
  int lo_state = kNormal;
  int hi_state = kNormal;

  bool contains(int s) const { return lo_state <= s && s <= hi_state; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Knots separating consecutive segments; knots.size() == segments.size() - 1.
struct KnotSet {
  std::vector<double> knots;
  std::vector<Segment> segments{Segment{}};

  int num_states() const { return static_cast<int>(segments.size()); }

  /// Segment whose slope is constrained to be nonnegative and which every
  /// other slope must dominate: the one holding the normal state, else the
  /// one holding the state closest to normal.
  int reference_segment() const;

  /// Segment index of covariate value `x` (x <= knot goes left).
  int segment_of(double x) const;

  /// One representative code per segment (the normal state if contained).
  std::vector<int> state_labels() const;

  /// Throws InputError unless knots are strictly increasing and segments
  /// are contiguous, ordered and sized consistently.
  void validate() const;
};

/// Single-segment knot set covering `state`.
KnotSet single_state_knots(int state);

using BasisMask = std::bitset<kMaxCoefficients>;

/// Position of the basis functions in canonical coefficient order:
/// 1, x, (x-a1)^0, (x-a1)^1, (x-a2)^0, (x-a2)^1, (x-a3)^0, (x-a3)^1.
constexpr int jump_position(int knot) { return 2 + 2 * knot; }
constexpr int hinge_position(int knot) { return 3 + 2 * knot; }

enum class ModelClass { Intercept, SimpleLinear, PiecewiseLevel, PiecewiseLinear };

std::string_view to_string(ModelClass c);
ModelClass classify(const BasisMask& mask);

/// A submodel of the spline family: a knot set and a subset of basis functions.
struct SplineSpec {
  KnotSet knotset;
  BasisMask included;

  /// Full model (every basis function of the knot set's family).
  static SplineSpec full(KnotSet knotset);

  int num_basis() const { return 2 * knotset.num_states(); }
  int k() const { return static_cast<int>(included.count()); }
  std::vector<int> positions() const;
  ModelClass model_class() const { return classify(included); }

  /// e.g. "1101" for S=2: one character per canonical position.
  std::string mask_string() const;
};

/// X, the restricted constraint system C theta >= 0, and the gram matrix X'X.
struct DesignSystem {
  Matrix X;
  Matrix C;
  Matrix gram;
  std::vector<int> positions;  // canonical position of each column
};

/// Canonical-order basis functions evaluated at x (length 2S).
Vector basis_row(const KnotSet& knots, double x);

/// (2S-1) x 2S constraint matrix of the full model in canonical order.
Matrix full_constraints(const KnotSet& knots);

/// Columns of full_constraints kept for `spec`, with vacuous and duplicate
/// rows removed.
Matrix restricted_constraints(const SplineSpec& spec);

DesignSystem build_design(std::span<const double> x, const SplineSpec& spec);
DesignSystem build_design(const GeneRecord& record, const SplineSpec& spec);

/// All 2^(2S-1) masks with the intercept set, in binary counting order over
/// the non-intercept positions.
std::vector<BasisMask> enumerate_masks(int num_states);
std::vector<SplineSpec> enumerate_submodels(const KnotSet& knots);

Vector predict(const SplineSpec& spec, const Vector& theta, std::span<const double> xs);

/// Spread included-only coefficients into canonical positions (zeros elsewhere).
Vector expand_coefficients(const SplineSpec& spec, const Vector& theta);

/// Merge segments observed fewer than `min_count` times into a neighbour by
/// deleting the separating knot. Returns the knots unchanged when nothing is
/// sparse. Sets *merged when a merge happened.
KnotSet merge_sparse_segments(const KnotSet& knots, std::span<const double> x, int min_count,
                              bool* merged = nullptr);

}  // namespace plrs
