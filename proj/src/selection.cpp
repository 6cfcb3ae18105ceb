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

#include "plrs/rng.hpp"

#include <cmath>

namespace plrs {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::OSAIC: return "osaic";
    case Criterion::AIC: return "aic";
    case Criterion::BIC: return "bic";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view s) {
  if (s == "osaic" || s == "OSAIC") return Criterion::OSAIC;
  if (s == "aic" || s == "AIC") return Criterion::AIC;
  if (s == "bic" || s == "BIC") return Criterion::BIC;
  return std::nullopt;
}

double osaic(const FitResult& fit, const ChibarWeights& weights, int k) {
  if (weights.p != fit.multipliers.size() || weights.w.size() != weights.p + 1)
    throw InputError("level probabilities do not match the submodel's constraint count");
  return -fit.loglik + weights.expected_dimension(k);
}

double aic(const FitResult& fit, int k) { return -fit.loglik + k; }

double bic(const FitResult& fit, int k, Eigen::Index n) {
  return -2.0 * fit.loglik + std::log(static_cast<double>(n)) * k;
}

double SubmodelScore::score(Criterion c) const {
  switch (c) {
    case Criterion::OSAIC: return osaic;
    case Criterion::AIC: return aic;
    case Criterion::BIC: return bic;
  }
  return osaic;
}

const SubmodelScore& SelectionResult::best(Criterion c) const {
  switch (c) {
    case Criterion::OSAIC: return scores.at(best_osaic);
    case Criterion::AIC: return scores.at(best_aic);
    case Criterion::BIC: return scores.at(best_bic);
  }
  return scores.at(best_osaic);
}

namespace {

std::size_t argmin(const std::vector<SubmodelScore>& scores, Criterion c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const double a = scores[i].score(c), b = scores[best].score(c);
    const double tie = 1e-12 * std::max(1.0, std::abs(b));
    if (a < b - tie || (std::abs(a - b) <= tie && scores[i].spec.k() < scores[best].spec.k()))
      best = i;
  }
  return best;
}

}  // namespace

SelectionResult select_model(std::span<const double> x, const Vector& y, const KnotSet& knots,
                             const SelectionOptions& options) {
  SelectionResult out;
  const auto specs = enumerate_submodels(knots);
  const auto n = y.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    DesignSystem D;
    try {
      D = build_design(x, spec);
    } catch (const InputError& e) {
      out.skipped.push_back(spec.mask_string() + ": " + e.what());
      continue;
    }
    SubmodelScore s{spec, fit_inequality(D, y), {}, 0.0, 0.0, 0.0};
    s.weights = chibar_weights(D.C, D.gram, options.n_draws, stream_seed(options.seed, i));
    const int k = spec.k();
    s.osaic = osaic(s.fit, s.weights, k);
    s.aic = aic(s.fit, k);
    s.bic = bic(s.fit, k, n);
    out.scores.push_back(std::move(s));
  }
  if (out.scores.empty()) throw InputError("no submodel could be fitted");
  out.best_osaic = argmin(out.scores, Criterion::OSAIC);
  out.best_aic = argmin(out.scores, Criterion::AIC);
  out.best_bic = argmin(out.scores, Criterion::BIC);
  return out;
}

}  // namespace plrs
