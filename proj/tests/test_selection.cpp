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

#include "plrs/selection.hpp"

#include <doctest.h>

#include <random>

using namespace plrs;

namespace {

const KnotSet kTwoState{{0.5}, {{0, 0}, {1, 1}}};

FitResult fit_with_loglik(double ll, int q = 0) {
  FitResult f;
  f.loglik = ll;
  f.multipliers = Vector::Zero(q);
  return f;
}

}  // namespace

TEST_CASE("penalties of unconstrained models") {
  ChibarWeights none;
  CHECK(osaic(fit_with_loglik(-10.0), none, 1) == doctest::Approx(11.0));
  CHECK(osaic(fit_with_loglik(-10.0), none, 3) == aic(fit_with_loglik(-10.0), 3));
  CHECK(aic(fit_with_loglik(-10.0), 3) == doctest::Approx(13.0));
  CHECK(bic(fit_with_loglik(-10.0), 3, 7) == doctest::Approx(20.0 + 3.0 * std::log(7.0)));
  CHECK_THROWS_AS(osaic(fit_with_loglik(-10.0, 2), none, 3), InputError);
}

TEST_CASE("constrained penalty is the expected face dimension") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U;
  std::vector<double> x(50);
  for (auto& v : x) v = U(rng);
  const auto D = build_design(x, SplineSpec::full(kTwoState));
  const auto w = chibar_weights(D.C, D.gram, 20000, 5);
  const double penalty = osaic(fit_with_loglik(0.0, 3), w, 4);
  double expected = 0.0;
  for (int h = 0; h <= 3; ++h) expected += w.w(h) * (1 + h);
  CHECK(penalty == doctest::Approx(expected).epsilon(1e-14));
  CHECK(penalty <= 4.0);
  CHECK(penalty >= 1.0);

  // direct expectation over projected draws z ~ N(0, G^-1)
  const Eigen::LLT<Matrix> llt(D.gram);
  const Matrix U_ = llt.matrixU();
  std::normal_distribution<double> N;
  double total = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    Vector e(4);
    for (auto& v : e) v = N(rng);
    const Vector z = U_.triangularView<Eigen::Upper>().solve(e);
    total += 4 - project_cone(z, D.gram, D.C).active_count;
  }
  // face dimension has sd <= 1.5; 4 sd of the mean plus the MC error of w
  CHECK(std::abs(total / draws - penalty) <= 4 * 1.5 / std::sqrt(draws) + 4 * w.mc_se);
}

TEST_CASE("equal fit prefers the smaller model") {
  std::vector<double> x(30);
  Vector y(30);
  for (int i = 0; i < 30; ++i) x[i] = i / 29.0, y(i) = (i % 2) ? 1.0 : -1.0;
  const auto sel = select_model(x, y, single_state_knots(kNormal), {2000, 1});
  REQUIRE(sel.scores.size() == 2);
  // the slope is not significant and equal-rss ties favour k = 1
  CHECK(sel.best(Criterion::AIC).spec.k() == 1);
  CHECK(sel.best(Criterion::BIC).spec.k() == 1);
}

TEST_CASE("single-state genes choose between intercept and slope") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0.0, 0.1);
  std::vector<double> x(25);
  Vector y(25);
  for (int i = 0; i < 25; ++i) x[i] = i / 24.0, y(i) = 1 + 2 * x[i] + N(rng);
  const auto sel = select_model(x, y, single_state_knots(kGain), {2000, 1});
  REQUIRE(sel.scores.size() == 2);
  CHECK(sel.best(Criterion::OSAIC).spec.model_class() == ModelClass::SimpleLinear);
}

TEST_CASE("strong hinge signal selects a piecewise linear model") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U;
  std::normal_distribution<double> N(0.0, 0.1);
  std::vector<double> x(80);
  Vector y(80);
  for (int i = 0; i < 80; ++i) {
    x[i] = U(rng);
    y(i) = 1 + 2 * std::max(x[i] - 0.5, 0.0) + N(rng);
  }
  const auto sel = select_model(x, y, kTwoState, {2000, 1});
  CHECK(sel.scores.size() == 8);
  for (auto c : {Criterion::OSAIC, Criterion::AIC, Criterion::BIC})
    CHECK(sel.best(c).spec.model_class() == ModelClass::PiecewiseLinear);
}

TEST_CASE("winner never scores worse than the intercept model") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U;
  std::normal_distribution<double> N;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(40);
    Vector y(40);
    for (int i = 0; i < 40; ++i) x[i] = U(rng), y(i) = N(rng);
    const auto sel = select_model(x, y, kTwoState, {1000, std::uint64_t(rep)});
    REQUIRE(sel.scores.front().spec.k() == 1);
    for (auto c : {Criterion::OSAIC, Criterion::AIC, Criterion::BIC})
      CHECK(sel.best(c).score(c) <= sel.scores.front().score(c));
    for (const auto& s : sel.scores) {
      const int k = s.spec.k();
      CHECK(s.osaic + s.fit.loglik <= k + 1e-12);
      CHECK(s.osaic + s.fit.loglik >= k - s.weights.p - 1e-12);
    }
  }
}

TEST_CASE("pure noise mostly selects the intercept") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U;
  std::normal_distribution<double> N;
  const int reps = 500;
  int osaic_hits = 0, bic_hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> x(80);
    Vector y(80);
    for (int i = 0; i < 80; ++i) x[i] = U(rng), y(i) = N(rng);
    const auto sel = select_model(x, y, kTwoState, {1000, std::uint64_t(rep)});
    osaic_hits += sel.best(Criterion::OSAIC).spec.model_class() == ModelClass::Intercept;
    bic_hits += sel.best(Criterion::BIC).spec.model_class() == ModelClass::Intercept;
  }
  MESSAGE("intercept selected: osaic " << osaic_hits << ", bic " << bic_hits << " of " << reps);
  CHECK(bic_hits >= 0.8 * reps);
}

TEST_CASE("criterion names round trip") {
  for (auto c : {Criterion::OSAIC, Criterion::AIC, Criterion::BIC})
    CHECK(parse_criterion(to_string(c)) == c);
  CHECK_FALSE(parse_criterion("mdl").has_value());
}
