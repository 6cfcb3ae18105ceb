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

#include "plrs/spline_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace plrs {

std::string_view state_name(int s) {
  switch (s) {
    case kLoss: return "loss";
    case kNormal: return "normal";
    case kGain: return "gain";
    case kAmp: return "amp";
    default: return "?";
  }
}

void GeneRecord::validate() const {
  const auto n = y.size();
  if (n < 1) throw InputError(id + ": no observations");
  if (x.size() != n || static_cast<Eigen::Index>(s.size()) != n)
    throw InputError(id + ": y, x and state vectors differ in length");
  if (!sample_ids.empty() && static_cast<Eigen::Index>(sample_ids.size()) != n)
    throw InputError(id + ": sample id count differs from observation count");
  for (int code : s)
    if (code < kLoss || code > kAmp)
      throw InputError(id + ": state code " + std::to_string(code) + " outside {-1,0,1,2}");
  if (callprobs) {
    if (callprobs->rows() != n || callprobs->cols() != kNumCallStates)
      throw InputError(id + ": call probabilities must be n x 4");
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((callprobs->row(i).array() < 0.0).any() ||
          std::abs(callprobs->row(i).sum() - 1.0) > 1e-6)
        throw InputError(id + ": call probabilities of sample " + std::to_string(i) +
                         " do not sum to 1");
    }
  }
}

std::vector<int> GeneRecord::states_present() const {
  std::vector<int> out(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] != out[i - 1] + 1)
      throw InputError(id + ": called states are not contiguous (" +
                       std::string(state_name(out[i - 1])) + " then " +
                       std::string(state_name(out[i])) + ")");
  return out;
}

int KnotSet::reference_segment() const {
  int best = 0;
  int best_dist = std::numeric_limits<int>::max();
  for (int m = 0; m < num_states(); ++m) {
    const auto& seg = segments[m];
    if (seg.contains(kNormal)) return m;
    const int dist = std::min(std::abs(seg.lo_state), std::abs(seg.hi_state));
    if (dist < best_dist) {
      best_dist = dist;
      best = m;
    }
  }
  return best;
}

int KnotSet::segment_of(double x) const {
  return static_cast<int>(std::lower_bound(knots.begin(), knots.end(), x) - knots.begin());
}

std::vector<int> KnotSet::state_labels() const {
  std::vector<int> labels;
  labels.reserve(segments.size());
  for (const auto& seg : segments) {
    if (seg.contains(kNormal))
      labels.push_back(kNormal);
    else
      labels.push_back(std::abs(seg.lo_state) < std::abs(seg.hi_state) ? seg.lo_state
                                                                        : seg.hi_state);
  }
  return labels;
}

void KnotSet::validate() const {
  if (segments.empty() || segments.size() > 4)
    throw InputError("knot set must describe between 1 and 4 segments");
  if (knots.size() + 1 != segments.size())
    throw InputError("knot count must be one less than the segment count");
  for (std::size_t j = 1; j < knots.size(); ++j)
    if (!(knots[j] > knots[j - 1])) throw InputError("knots must be strictly increasing");
  for (std::size_t m = 0; m < segments.size(); ++m) {
    if (segments[m].lo_state > segments[m].hi_state)
      throw InputError("segment state range is reversed");
    if (m > 0 && segments[m].lo_state != segments[m - 1].hi_state + 1)
      throw InputError("segments must cover contiguous states");
  }
}

KnotSet single_state_knots(int state) {
  return KnotSet{{}, {Segment{state, state}}};
}

std::string_view to_string(ModelClass c) {
  switch (c) {
    case ModelClass::Intercept: return "intercept";
    case ModelClass::SimpleLinear: return "simple-linear";
    case ModelClass::PiecewiseLevel: return "piecewise-level";
    case ModelClass::PiecewiseLinear: return "piecewise-linear";
  }
  return "?";
}

ModelClass classify(const BasisMask& mask) {
  bool jump = false, hinge = false;
  for (int j = 0; j < 3; ++j) {
    jump = jump || mask[jump_position(j)];
    hinge = hinge || mask[hinge_position(j)];
  }
  if (hinge) return ModelClass::PiecewiseLinear;
  if (jump) return ModelClass::PiecewiseLevel;
  if (mask[1]) return ModelClass::SimpleLinear;
  return ModelClass::Intercept;
}

SplineSpec SplineSpec::full(KnotSet knotset) {
  SplineSpec spec{std::move(knotset), {}};
  for (int i = 0; i < spec.num_basis(); ++i) spec.included.set(i);
  return spec;
}

std::vector<int> SplineSpec::positions() const {
  std::vector<int> out;
  for (int i = 0; i < num_basis(); ++i)
    if (included[i]) out.push_back(i);
  return out;
}

std::string SplineSpec::mask_string() const {
  std::string out;
  for (int i = 0; i < num_basis(); ++i) out.push_back(included[i] ? '1' : '0');
  return out;
}

Vector basis_row(const KnotSet& knots, double x) {
  const int S = knots.num_states();
  Vector row(2 * S);
  row(0) = 1.0;
  row(1) = x;
  for (int j = 0; j + 1 < S; ++j) {
    const double a = x - knots.knots[j];
    row(jump_position(j)) = a > 0.0 ? 1.0 : 0.0;
    row(hinge_position(j)) = a > 0.0 ? a : 0.0;
  }
  return row;
}

Matrix full_constraints(const KnotSet& knots) {
  const int S = knots.num_states();
  const int r = knots.reference_segment();
  Matrix C = Matrix::Zero(2 * S - 1, 2 * S);
  int row = 0;
  // Slope of segment m is theta_1 + sum_{j<=m} theta_{j,1}.
  C(row, 1) = 1.0;
  for (int j = 0; j < r; ++j) C(row, hinge_position(j)) = 1.0;
  ++row;
  for (int m = r + 1; m < S; ++m, ++row)
    for (int j = r; j < m; ++j) C(row, hinge_position(j)) = 1.0;
  for (int m = r - 1; m >= 0; --m, ++row)
    for (int j = m; j < r; ++j) C(row, hinge_position(j)) = -1.0;
  for (int j = 0; j + 1 < S; ++j, ++row) C(row, jump_position(j)) = 1.0;
  return C;
}

Matrix restricted_constraints(const SplineSpec& spec) {
  const Matrix full = full_constraints(spec.knotset);
  const auto cols = spec.positions();
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < full.rows(); ++i) {
    Vector r(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) r(c) = full(i, cols[c]);
    if (r.isZero(0.0)) continue;
    const bool dup = std::any_of(rows.begin(), rows.end(), [&](const Vector& o) { return o == r; });
    if (!dup) rows.push_back(std::move(r));
  }
  Matrix C(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) C.row(i) = rows[i].transpose();
  return C;
}

DesignSystem build_design(std::span<const double> x, const SplineSpec& spec) {
  spec.knotset.validate();
  if (!spec.included[0]) throw InputError("spline spec must include the intercept");
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto cols = spec.positions();
  const auto k = static_cast<Eigen::Index>(cols.size());
  if (n < k)
    throw InputError("design needs at least " + std::to_string(k) + " observations, got " +
                     std::to_string(n));
  DesignSystem D;
  D.positions = cols;
  D.X.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector b = basis_row(spec.knotset, x[i]);
    for (Eigen::Index c = 0; c < k; ++c) D.X(i, c) = b(cols[c]);
  }
  for (Eigen::Index c = 0; c < k; ++c)
    if (D.X.col(c).isZero(0.0))
      throw InputError("basis column " + std::to_string(cols[c]) +
                       " is identically zero (empty segment)");
  Eigen::ColPivHouseholderQR<Matrix> qr(D.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw InputError("design matrix is rank deficient");
  D.C = restricted_constraints(spec);
  D.gram = D.X.transpose() * D.X;
  return D;
}

DesignSystem build_design(const GeneRecord& record, const SplineSpec& spec) {
  return build_design(std::span<const double>(record.x.data(), record.x.size()), spec);
}

std::vector<BasisMask> enumerate_masks(int num_states) {
  if (num_states < 1 || num_states > 4) throw InputError("state count must be in 1..4");
  const int free = 2 * num_states - 1;
  std::vector<BasisMask> out;
  out.reserve(std::size_t{1} << free);
  for (unsigned long bits = 0; bits < (1ul << free); ++bits) {
    BasisMask m(bits << 1);
    m.set(0);
    out.push_back(m);
  }
  return out;
}

std::vector<SplineSpec> enumerate_submodels(const KnotSet& knots) {
  std::vector<SplineSpec> out;
  for (const auto& m : enumerate_masks(knots.num_states())) out.push_back(SplineSpec{knots, m});
  return out;
}

Vector expand_coefficients(const SplineSpec& spec, const Vector& theta) {
  const auto cols = spec.positions();
  if (theta.size() != static_cast<Eigen::Index>(cols.size()))
    throw InputError("coefficient vector length " + std::to_string(theta.size()) +
                     " does not match spec size " + std::to_string(cols.size()));
  Vector full = Vector::Zero(spec.num_basis());
  for (std::size_t c = 0; c < cols.size(); ++c) full(cols[c]) = theta(c);
  return full;
}

Vector predict(const SplineSpec& spec, const Vector& theta, std::span<const double> xs) {
  const Vector full = expand_coefficients(spec, theta);
  Vector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out(i) = basis_row(spec.knotset, xs[i]).dot(full);
  return out;
}

KnotSet merge_sparse_segments(const KnotSet& knots, std::span<const double> x, int min_count,
                              bool* merged) {
  KnotSet ks = knots;
  if (merged) *merged = false;
  while (ks.num_states() > 1) {
    const int S = ks.num_states();
    std::vector<int> count(S, 0);
    std::vector<double> sum(S, 0.0);
    for (double v : x) {
      const int m = ks.segment_of(v);
      ++count[m];
      sum[m] += v;
    }
    int worst = 0;
    for (int m = 1; m < S; ++m)
      if (count[m] < count[worst]) worst = m;
    if (count[worst] >= min_count) break;

    // Knot index to delete: the one between `worst` and the absorbing neighbour.
    int knot = 0;
    if (worst == 0) {
      knot = 0;
    } else if (worst == S - 1) {
      knot = S - 2;
    } else if (count[worst] == 0) {
      knot = worst - 1;
    } else {
      const double mean = sum[worst] / count[worst];
      auto neighbour_dist = [&](int m) {
        return count[m] > 0 ? std::abs(sum[m] / count[m] - mean)
                            : std::numeric_limits<double>::infinity();
      };
      knot = neighbour_dist(worst + 1) < neighbour_dist(worst - 1) ? worst : worst - 1;
    }
    Segment joined{ks.segments[knot].lo_state, ks.segments[knot + 1].hi_state};
    ks.segments.erase(ks.segments.begin() + knot, ks.segments.begin() + knot + 2);
    ks.segments.insert(ks.segments.begin() + knot, joined);
    ks.knots.erase(ks.knots.begin() + knot);
    if (merged) *merged = true;
  }
  return ks;
}

}  // namespace plrs
