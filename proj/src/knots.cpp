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

#include "plrs/knots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace plrs {
namespace {

std::vector<int> contiguous_states(std::span<const int> s) {
  std::vector<int> out(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] != out[i - 1] + 1) throw InputError("called states are not contiguous");
  return out;
}

std::vector<Segment> singleton_segments(std::span<const int> states) {
  std::vector<Segment> segs;
  for (int st : states) segs.push_back(Segment{st, st});
  return segs;
}

}  // namespace

KnotSet knots_from_calls(std::span<const double> x, std::span<const int> s) {
  if (x.size() != s.size()) throw InputError("covariate and state vectors differ in length");
  if (x.empty()) throw InputError("no observations");
  const auto states = contiguous_states(s);
  KnotSet ks;
  ks.segments = singleton_segments(states);
  for (std::size_t b = 0; b + 1 < states.size(); ++b) {
    const int lo = states[b], hi = states[b + 1];
    std::size_t imax = 0, imin = 0;
    double xmax = -std::numeric_limits<double>::infinity();
    double xmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (s[i] == lo && x[i] > xmax) xmax = x[i], imax = i;
      if (s[i] == hi && x[i] < xmin) xmin = x[i], imin = i;
    }
    if (!(xmax < xmin))
      throw OrderingError("calls do not respect covariate order: sample " + std::to_string(imax) +
                              " (" + std::string(state_name(lo)) + ", x=" + std::to_string(xmax) +
                              ") >= sample " + std::to_string(imin) + " (" +
                              std::string(state_name(hi)) + ", x=" + std::to_string(xmin) + ")",
                          imax, imin);
    ks.knots.push_back(0.5 * (xmax + xmin));
  }
  return ks;
}

double cut_objective(std::span<const double> x, const Matrix& callprobs, int lower_state,
                     double alpha) {
  const int lo = callprob_column(lower_state), hi = callprob_column(lower_state + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += callprobs(i, x[i] <= alpha ? lo : hi);
  return total;
}

KnotSet knots_from_probabilities(std::span<const double> x, const Matrix& callprobs,
                                 std::span<const int> states) {
  const auto n = x.size();
  if (n == 0) throw InputError("no observations");
  if (callprobs.rows() != static_cast<Eigen::Index>(n) || callprobs.cols() != kNumCallStates)
    throw InputError("call probabilities missing or not n x 4");
  for (std::size_t i = 1; i < states.size(); ++i)
    if (states[i] != states[i - 1] + 1) throw InputError("states are not contiguous");

  // Hard-call midpoints break ties between disjoint maximising intervals.
  std::optional<KnotSet> reference;
  if (states.size() > 1) {
    std::vector<int> calls(n);
    for (std::size_t i = 0; i < n; ++i) {
      int best = states.front();
      for (int st : states)
        if (callprobs(i, callprob_column(st)) > callprobs(i, callprob_column(best))) best = st;
      calls[i] = best;
    }
    try {
      auto ks = knots_from_calls(x, calls);
      if (ks.num_states() == static_cast<int>(states.size())) reference = std::move(ks);
    } catch (const InputError&) {
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> values;  // sorted distinct covariate values
  for (auto i : order)
    if (values.empty() || x[i] != values.back()) values.push_back(x[i]);
  const std::size_t m = values.size();

  KnotSet ks;
  ks.segments = singleton_segments(states);
  for (std::size_t b = 0; b + 1 < states.size(); ++b) {
    const int lo = callprob_column(states[b]), hi = callprob_column(states[b + 1]);
    // objective[c]: the c smallest distinct values sit on the lower side.
    std::vector<double> objective(m + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += callprobs(i, hi);
    objective[0] = acc;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < m; ++c) {
      while (pos < n && x[order[pos]] == values[c]) {
        acc += callprobs(order[pos], lo) - callprobs(order[pos], hi);
        ++pos;
      }
      objective[c + 1] = acc;
    }
    const double best = *std::max_element(objective.begin(), objective.end());
    const double tol = 1e-12 * (1.0 + std::abs(best));

    double chosen = std::numeric_limits<double>::quiet_NaN();
    double chosen_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c <= m;) {
      if (objective[c] < best - tol) {
        ++c;
        continue;
      }
      std::size_t end = c;
      while (end + 1 <= m && objective[end + 1] >= best - tol) ++end;
      const double left = values[c == 0 ? 0 : c - 1];
      const double right = values[std::min(end, m - 1)];
      const double mid = 0.5 * (left + right);
      const double dist = reference ? std::abs(mid - reference->knots[b]) : 0.0;
      if (std::isnan(chosen) || dist < chosen_dist) {
        chosen = mid;
        chosen_dist = dist;
      }
      c = end + 1;
    }
    ks.knots.push_back(chosen);
  }
  return ks;
}

}  // namespace plrs
