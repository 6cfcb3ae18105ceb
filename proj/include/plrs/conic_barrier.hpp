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

// Log-barrier interior-point method for
//
//   minimize  a' theta
//   subject to  C theta >= 0,  ||M (theta - center)||^2 <= lambda,
//
// i.e. a linear objective over a polyhedral cone cut by one ellipsoid. The
// linear rows and the ellipsoid are the two blocks of a block-diagonal linear
// matrix inequality; here they are handled directly as scalar barriers.
//
// The solver works in u = M (theta - center) / sqrt(lambda), where the
// ellipsoid becomes the unit ball.

#pragma once

#include "plrs/types.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace plrs {

struct BarrierOptions {
  double initial_t = 1.0;
  double growth = 10.0;
  double centering_tol = 1e-9;  // Newton decrement^2 / 2
  double gap_tol = 1e-7;        // relative to 1 + |value|
  int max_newton = 2000;
};

template <typename Scalar>
struct BarrierSolution {
  Scalar value = 0;       // a' theta at the returned point
  Scalar dual_bound = 0;  // Lagrange dual value; dual_bound <= optimum <= value
  VectorX<Scalar> theta;
  VectorX<Scalar> mu;     // multipliers of C theta >= 0
  Scalar nu = 0;          // multiplier of lambda - ||M(theta - center)||^2 >= 0
  int newton_steps = 0;
};

/// Lagrange dual function of the problem above at (mu >= 0, nu > 0):
/// a'c - mu'Cc - ||M^-T (C'mu - a)||^2 / (4 nu) - nu lambda, c = center.
template <typename Scalar>
Scalar region_dual_value(const VectorX<Scalar>& a, const VectorX<Scalar>& center,
                         const MatrixX<Scalar>& M, Scalar lambda, const MatrixX<Scalar>& C,
                         const VectorX<Scalar>& mu, Scalar nu) {
  VectorX<Scalar> r = -a;
  Scalar value = a.dot(center);
  if (C.rows() > 0) {
    r += C.transpose() * mu;
    value -= mu.dot(C * center);
  }
  const VectorX<Scalar> w = M.transpose().template triangularView<Eigen::Lower>().solve(r);
  return value - w.squaredNorm() / (4 * nu) - nu * lambda;
}

/// M must be upper triangular with M'M positive definite; the cone must have
/// an interior (C of full row rank) and `center` must satisfy C center >= 0.
template <typename Scalar>
BarrierSolution<Scalar> minimize_over_region(const VectorX<Scalar>& a,
                                             const VectorX<Scalar>& center,
                                             const MatrixX<Scalar>& M, Scalar lambda,
                                             const MatrixX<Scalar>& C,
                                             const BarrierOptions& opt = {}) {
  using std::abs;
  using std::log;
  using std::sqrt;
  const Eigen::Index k = center.size();
  const Eigen::Index q = C.rows();
  BarrierSolution<Scalar> sol;
  sol.mu = VectorX<Scalar>::Zero(q);
  if (lambda < 0) throw SolverError("ellipsoid radius must be nonnegative");
  if (lambda == 0) {
    sol.theta = center;
    sol.value = sol.dual_bound = a.dot(center);
    return sol;
  }

  const auto Mtri = M.template triangularView<Eigen::Upper>();
  const Scalar root = sqrt(lambda);
  // theta = center + root * Minv u
  MatrixX<Scalar> Minv = Mtri.solve(MatrixX<Scalar>::Identity(k, k));
  const VectorX<Scalar> g = root * (Minv.transpose() * a);  // objective in u
  const Scalar offset = a.dot(center);
  MatrixX<Scalar> A(q, k);
  VectorX<Scalar> b(q);
  if (q > 0) {
    A = root * (C * Minv);
    b = C * center;
  }

  // Strictly feasible start: step from the centre into the cone interior.
  VectorX<Scalar> u = VectorX<Scalar>::Zero(k);
  if (q > 0) {
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(C);
    qr.setThreshold(Scalar(1e-10));
    if (qr.rank() < q) throw SolverError("constraint cone has no interior");
    const VectorX<Scalar> d =
        C.transpose() * (C * C.transpose()).ldlt().solve(VectorX<Scalar>::Ones(q));
    const VectorX<Scalar> ud = M * d;
    u = Scalar(0.5) * ud / ud.norm();
  }

  auto slack = [&](const VectorX<Scalar>& v) -> VectorX<Scalar> {
    if (q == 0) return VectorX<Scalar>();
    return A * v + b;
  };
  auto feasible = [&](const VectorX<Scalar>& v) {
    if (v.squaredNorm() >= 1) return false;
    const VectorX<Scalar> s = slack(v);
    return q == 0 || (s.array() > 0).all();
  };
  auto barrier_obj = [&](Scalar t, const VectorX<Scalar>& v) {
    Scalar f = t * g.dot(v) - log(1 - v.squaredNorm());
    const VectorX<Scalar> s = slack(v);
    for (Eigen::Index i = 0; i < q; ++i) f -= log(s(i));
    return f;
  };
  if (!feasible(u)) throw SolverError("could not find a strictly feasible starting point");

  const Scalar m = static_cast<Scalar>(q + 1);
  Scalar t = opt.initial_t;
  for (;;) {
    // Centering by damped Newton.
    for (;;) {
      if (++sol.newton_steps > opt.max_newton)
        throw SolverError("barrier method: Newton iteration cap exceeded");
      const Scalar r2 = u.squaredNorm();
      const Scalar ball = 1 - r2;
      VectorX<Scalar> grad = t * g + (2 / ball) * u;
      MatrixX<Scalar> H = (2 / ball) * MatrixX<Scalar>::Identity(k, k) +
                          (4 / (ball * ball)) * (u * u.transpose());
      if (q > 0) {
        const VectorX<Scalar> s = slack(u);
        const VectorX<Scalar> inv = s.cwiseInverse();
        grad -= A.transpose() * inv;
        H += A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
      }
      const VectorX<Scalar> step = -H.ldlt().solve(grad);
      const Scalar decrement2 = -grad.dot(step);
      if (decrement2 / 2 <= opt.centering_tol) break;
      if (!std::isfinite(static_cast<double>(decrement2)))
        throw SolverError("barrier method: singular Newton system");
      Scalar alpha = 1;
      while (alpha >= Scalar(1e-20) && !feasible(u + alpha * step)) alpha /= 2;
      const Scalar f0 = barrier_obj(t, u);
      Scalar f1 = f0;
      while (alpha >= Scalar(1e-20) &&
             (f1 = barrier_obj(t, u + alpha * step)) > f0 - Scalar(0.25) * alpha * decrement2)
        alpha /= 2;
      // At large t the decrement can stall at roundoff; stop once steps no
      // longer move u or no longer lower the barrier objective measurably.
      if (alpha < Scalar(1e-20)) break;
      const VectorX<Scalar> next = u + alpha * step;
      if (next == u) break;
      u = next;
      const Scalar eps = std::numeric_limits<Scalar>::epsilon();
      if (f0 - f1 <= 64 * eps * (1 + abs(f0))) break;
    }
    const Scalar value = offset + g.dot(u);
    if (m / t <= opt.gap_tol * (1 + abs(value))) break;
    t *= opt.growth;
  }

  sol.theta = center + root * (Minv * u);
  sol.value = a.dot(sol.theta);
  if (q > 0) sol.mu = (t * slack(u)).cwiseInverse();
  sol.nu = 1 / (t * (1 - u.squaredNorm()) * lambda);
  sol.dual_bound = region_dual_value<Scalar>(a, center, M, lambda, C, sol.mu, sol.nu);
  return sol;
}

}  // namespace plrs
