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

#include "plrs/chibar.hpp"

#include "plrs/cqp.hpp"
#include "plrs/spline_model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace plrs;

namespace {

// |a - b| <= 3 combined standard errors, entry by entry.
bool within_3se(const Vector& a, const Vector& b, double se_a, double se_b) {
  const double tol = 3.0 * std::sqrt(se_a * se_a + se_b * se_b) + 1e-12;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Gram metric in which the two coordinate normals meet at the given angle.
Matrix gram_for_angle(double degrees) {
  const double r = std::cos(degrees * M_PI / 180.0);
  Matrix V(2, 2);  // covariance of theta = G^-1
  V << 1, r, r, 1;
  return V.inverse();
}

}  // namespace

TEST_CASE("no constraints gives a single unit weight") {
  const auto w = chibar_weights(Matrix(0, 3), Matrix::Identity(3, 3), 1000, 1);
  CHECK(w.p == 0);
  CHECK(w.w.size() == 1);
  CHECK(w.w(0) == 1.0);
  CHECK(w.expected_dimension(3) == 3.0);
}

TEST_CASE("one constraint splits evenly") {
  std::mt19937_64 rng(1);
  Matrix C(1, 3);
  C << 0.3, -1.0, 2.0;
  const Matrix G = oracle::random_spd(3, rng);
  const auto exact = weights_exact_small(C, G);
  CHECK(exact.exact);
  CHECK(exact.w(0) == 0.5);
  CHECK(exact.w(1) == 0.5);
  const auto mc = weights_mc(C, G, 20000, 5);
  CHECK_FALSE(mc.exact);
  CHECK(std::abs(mc.w(0) - 0.5) <= 3 * mc.mc_se);
}

TEST_CASE("orthogonal normals give a quarter, a half and a quarter") {
  const Matrix C = Matrix::Identity(2, 2);
  const auto exact = weights_exact_small(C, gram_for_angle(90));
  CHECK(exact.w(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(exact.w(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exact.w(2) == doctest::Approx(0.25).epsilon(1e-15));
  const auto mc = weights_mc(C, gram_for_angle(90), 20000, 9);
  Vector expected(3);
  expected << 0.25, 0.5, 0.25;
  CHECK(within_3se(mc.w, expected, mc.mc_se, 0.0));
}

TEST_CASE("correlated normals agree with a long reference run") {
  const Matrix C = Matrix::Identity(2, 2);
  const Matrix G = gram_for_angle(60);
  const auto exact = weights_exact_small(C, G);
  const auto reference = weights_mc(C, G, 1'000'000, 1234);
  CHECK(within_3se(exact.w, reference.w, 0.0, reference.mc_se));
  const auto mc = weights_mc(C, G, 20000, 77);
  CHECK(within_3se(mc.w, reference.w, mc.mc_se, reference.mc_se));
}

TEST_CASE("exact and Monte Carlo weights agree over random metrics") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> N;
  for (int rep = 0; rep < 10; ++rep) {
    const int k = 2 + rep % 3;
    const Matrix G = oracle::random_spd(k, rng);
    Matrix C(2, k);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < k; ++j) C(i, j) = N(rng);
    const auto exact = weights_exact_small(C, G);
    const auto mc = weights_mc(C, G, 20000, 100 + rep);
    CHECK(within_3se(exact.w, mc.w, 0.0, mc.mc_se));
  }
}

TEST_CASE("weights are a distribution, reproducible and scale free") {
  const KnotSet knots{{-0.3, 0.2, 0.7}, {{-1, -1}, {0, 0}, {1, 1}, {2, 2}}};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.5);
  std::vector<double> x(60);
  for (auto& v : x) v = U(rng);
  const auto D = build_design(x, SplineSpec::full(knots));
  const auto a = chibar_weights(D.C, D.gram, 5000, 42);
  const auto b = chibar_weights(D.C, D.gram, 5000, 42);
  CHECK(a.p == 7);
  CHECK(a.w.size() == 8);
  CHECK((a.w.array() >= 0).all());
  CHECK(a.w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.w == b.w);
  const auto scaled = chibar_weights(D.C, 7.5 * D.gram, 5000, 42);
  CHECK((scaled.w - a.w).cwiseAbs().maxCoeff() <= 2.0 / 5000);
  const auto other = chibar_weights(D.C, D.gram, 5000, 43);
  CHECK(other.w != a.w);
}

TEST_CASE("dependent rows fall back to rank counting") {
  // theta_1 >= 0 and -theta_1 >= 0 pin theta_1; theta_2 >= 0 is free.
  Matrix C(3, 3);
  C << 0, 1, 0,  //
      0, -1, 0,  //
      0, 0, 1;
  const auto w = chibar_weights(C, Matrix::Identity(3, 3), 20000, 8);
  CHECK(w.w.size() == 4);
  // the face always has rank >= 1 active, so h <= 2: h = 3 - rank
  CHECK(w.w(3) == 0.0);
  CHECK(std::abs(w.w(2) - 0.5) <= 3 * w.mc_se);
  CHECK(std::abs(w.w(1) - 0.5) <= 3 * w.mc_se);
}

TEST_CASE("Monte Carlo face counts agree with direct projection") {
  // Independent count: project draws z ~ N(0, G^-1) with the QP and count
  // the rank of the binding rows.
  std::mt19937_64 rng(30);
  const Matrix G = oracle::random_spd(4, rng);
  Matrix C(3, 4);
  C << 0, 1, 0, 0,  //
      0, 0, 1, 0,   //
      0, 1, 0, 1;
  const Eigen::LLT<Matrix> llt(G);
  const Matrix L = llt.matrixL();
  std::normal_distribution<double> N;
  Vector counts = Vector::Zero(4);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    Vector e(4);
    for (auto& v : e) v = N(rng);
    const Vector z = L.transpose().triangularView<Eigen::Upper>().solve(e);
    counts(3 - project_cone(z, G, C).active_count) += 1;
  }
  counts /= draws;
  const auto w = weights_mc(C, G, 20000, 3);
  const double se_ref = std::sqrt(0.25 / draws);
  CHECK(within_3se(w.w, counts, w.mc_se, se_ref));
}
