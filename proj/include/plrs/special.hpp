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

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plrs {

namespace detail {

// Continued fraction for I_x(a, b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
template <typename Scalar>
Scalar beta_continued_fraction(Scalar a, Scalar b, Scalar x) {
  using std::abs;
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar qab = a + b, qap = a + 1, qam = a - 1;
  Scalar c = 1;
  Scalar d = 1 - qab * x / qap;
  if (abs(d) < tiny) d = tiny;
  d = 1 / d;
  Scalar h = d;
  for (int m = 1; m <= 10000; ++m) {
    const Scalar m2 = 2 * m;
    Scalar aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar del = d * c;
    h *= del;
    if (abs(del - 1) < 4 * eps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

template <typename Scalar>
Scalar beta_prefactor(Scalar a, Scalar b, Scalar x) {
  using std::exp;
  using std::lgamma;
  using std::log;
  return exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x));
}

}  // namespace detail

/// Regularised incomplete beta function I_x(a, b), a, b > 0.
template <typename Scalar>
Scalar regularized_beta(Scalar a, Scalar b, Scalar x) {
  if (!(a > 0) || !(b > 0)) throw std::domain_error("beta shape parameters must be positive");
  if (x <= 0) return Scalar(0);
  if (x >= 1) return Scalar(1);
  const Scalar front = detail::beta_prefactor(a, b, x);
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1 - front * detail::beta_continued_fraction(b, a, Scalar(1) - x) / b;
}

/// P(B > x) for B ~ Beta(a, b), evaluated without cancellation in the tail.
template <typename Scalar>
Scalar beta_survival(Scalar a, Scalar b, Scalar x) {
  if (x <= 0) return Scalar(1);
  if (x >= 1) return Scalar(0);
  return regularized_beta(b, a, Scalar(1) - x);
}

/// Upper tail of the F(d1, d2) distribution.
template <typename Scalar>
Scalar f_survival(Scalar f, Scalar d1, Scalar d2) {
  if (!(f > 0)) return Scalar(1);
  return regularized_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

}  // namespace plrs
