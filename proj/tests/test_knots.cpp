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

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

using namespace plrs;

namespace {

Matrix probs_from(const std::vector<std::array<double, 4>>& rows) {
  Matrix P(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < 4; ++j) P(i, j) = rows[i][j];
  return P;
}

// Brute-force scan over thresholds t (x <= t versus x > t): plausibility of
// the lower state below plus that of the upper state above. Returns the
// midpoint of the first maximising interval.
double brute_knot(const std::vector<double>& x, const Matrix& P, int lower_state) {
  std::vector<double> v(x);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  const int lower_col = lower_state + 1;
  auto score = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x[i] <= t ? P(i, lower_col) : P(i, lower_col + 1);
    }
    return s;
  };
  // thresholds: below all values, and at each value
  std::vector<double> scores;
  scores.push_back(score(v.front() - 1.0));
  for (double t : v) scores.push_back(score(t));
  const double best = *std::max_element(scores.begin(), scores.end());
  // first maximising run
  std::size_t a = 0;
  while (scores[a] < best - 1e-12) ++a;
  std::size_t b = a;
  while (b + 1 < scores.size() && scores[b + 1] >= best - 1e-12) ++b;
  // run a..b of thresholds; the knot set spans (v[a-1] or min, v[b] or max]
  const double lo = a == 0 ? v.front() : v[a - 1];
  const double hi = b >= v.size() ? v.back() : v[std::min(b, v.size() - 1)];
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("call-based knots are midpoints between states") {
  const std::vector<double> x{-0.5, 0.1, 0.2, 0.6};
  const std::vector<int> s{-1, 0, 0, 1};
  const auto k = knots_from_calls(x, s);
  REQUIRE(k.knots.size() == 2);
  CHECK(k.knots[0] == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(k.knots[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(k.num_states() == 3);
  CHECK(k.state_labels() == std::vector<int>{-1, 0, 1});
}

TEST_CASE("a single state gives no knots") {
  const std::vector<double> x{0.1, 0.2, 0.3};
  const std::vector<int> s{1, 1, 1};
  const auto k = knots_from_calls(x, s);
  CHECK(k.knots.empty());
  CHECK(k.num_states() == 1);
  CHECK(k.state_labels() == std::vector<int>{1});
}

TEST_CASE("overlapping states report the offending observations") {
  const std::vector<double> x{0.0, 0.3, 0.2, 0.9};
  const std::vector<int> s{0, 0, 1, 1};
  try {
    knots_from_calls(x, s);
    FAIL("expected an ordering error");
  } catch (const OrderingError& e) {
    CHECK(e.lower_index == 1);
    CHECK(e.upper_index == 2);
  }
}

TEST_CASE("probability-based knot on a small example") {
  const std::vector<double> x{0.0, 0.1, 0.5, 0.6};
  const Matrix P = probs_from({{0, 0.9, 0.1, 0}, {0, 0.8, 0.2, 0}, {0, 0.2, 0.8, 0}, {0, 0.1, 0.9, 0}});
  const std::vector<int> states{0, 1};
  const auto k = knots_from_probabilities(x, P, states);
  REQUIRE(k.knots.size() == 1);
  CHECK(k.knots[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(k.knots[0] == doctest::Approx(brute_knot(x, P, 0)));
}

TEST_CASE("perfectly separated probabilities reproduce the call midpoint") {
  const std::vector<double> x{0.05, 0.2, 0.25, 0.7, 0.9};
  const Matrix P = probs_from({{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}});
  const std::vector<int> states{0, 1};
  const auto k = knots_from_probabilities(x, P, states);
  CHECK(k.knots[0] == doctest::Approx(0.475));
}

TEST_CASE("identical probabilities span the whole range") {
  const std::vector<double> x{0.3, -0.2, 0.8, 0.1};
  const Matrix P = probs_from({{0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}});
  const std::vector<int> states{0, 1};
  const auto k = knots_from_probabilities(x, P, states);
  CHECK(k.knots[0] == doctest::Approx(0.3));
}

TEST_CASE("probability knots match the brute-force scan on random data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 6 + rep % 10;
    std::vector<double> x(n);
    Matrix P = Matrix::Zero(n, 4);
    for (int i = 0; i < n; ++i) {
      x[i] = U(rng);
      const double pg = std::clamp(x[i] + 0.4 * (U(rng) - 0.5), 0.0, 1.0);
      P(i, 1) = 1.0 - pg;
      P(i, 2) = pg;
    }
    const std::vector<int> states{0, 1};
    const auto k = knots_from_probabilities(x, P, states);
    CHECK(k.knots[0] == doctest::Approx(brute_knot(x, P, 0)).epsilon(1e-14));
  }
}

TEST_CASE("probability knots respect state order for three states") {
  const std::vector<double> x{-0.6, -0.5, -0.1, 0.0, 0.1, 0.5, 0.6};
  const Matrix P = probs_from({{0.9, 0.1, 0, 0},
                               {0.8, 0.2, 0, 0},
                               {0.1, 0.9, 0, 0},
                               {0, 0.9, 0.1, 0},
                               {0, 0.8, 0.2, 0},
                               {0, 0.1, 0.9, 0},
                               {0, 0.0, 1.0, 0}});
  const std::vector<int> states{-1, 0, 1};
  const auto k = knots_from_probabilities(x, P, states);
  REQUIRE(k.knots.size() == 2);
  CHECK(k.knots[0] == doctest::Approx(-0.3));
  CHECK(k.knots[1] == doctest::Approx(0.3));
  CHECK(k.knots[0] < k.knots[1]);
}
