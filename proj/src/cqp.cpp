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

#include "plrs/cqp.hpp"

#include <cmath>
#include <numbers>

namespace plrs {
namespace {

FitResult finish(const DesignSystem& D, const Vector& y, Vector theta) {
  FitResult f;
  f.n = y.size();
  f.rss = (y - D.X * theta).squaredNorm();
  f.loglik = profile_loglik(f.rss, f.n);
  f.theta = std::move(theta);
  f.multipliers = Vector::Zero(D.C.rows());
  return f;
}

void check_sizes(const DesignSystem& D, const Vector& y) {
  if (D.X.rows() != y.size()) throw InputError("response length does not match design rows");
}

}  // namespace

double profile_loglik(double rss, Eigen::Index n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * rss / nn) + 1.0);
}

FitResult fit_unconstrained(const DesignSystem& D, const Vector& y) {
  check_sizes(D, y);
  Eigen::LLT<Matrix> llt(D.gram);
  if (llt.info() != Eigen::Success) throw SolverError("gram matrix is singular");
  // QR on X rather than the normal equations: better conditioned.
  Eigen::ColPivHouseholderQR<Matrix> qr(D.X);
  FitResult f = finish(D, y, qr.solve(y));
  f.kkt_residual = (D.gram * f.theta - D.X.transpose() * y).cwiseAbs().maxCoeff() /
                   std::max(1.0, (D.X.transpose() * y).cwiseAbs().maxCoeff());
  return f;
}

FitResult fit_inequality(const DesignSystem& D, const Vector& y, const QpTolerances& tol) {
  check_sizes(D, y);
  const Vector c = D.X.transpose() * y;
  const auto sol = solve_cone_qp<double>(D.gram, c, D.C, tol);
  FitResult f = finish(D, y, sol.theta);
  f.active = sol.active;
  f.active_rank = sol.active_rank;
  f.kkt_residual = sol.kkt_residual;
  f.multipliers = sol.multipliers;
  return f;
}

FitResult fit_equality(const DesignSystem& D, const Vector& y) {
  check_sizes(D, y);
  const Eigen::Index k = D.X.cols(), q = D.C.rows();
  if (q == 0) return fit_unconstrained(D, y);
  Eigen::ColPivHouseholderQR<Matrix> rank_qr(D.C);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() < q) throw SolverError("equality constraints are rank deficient");

  Eigen::HouseholderQR<Matrix> qr(D.C.transpose());
  const Matrix Q = qr.householderQ() * Matrix::Identity(k, k);
  const Matrix Z = Q.rightCols(k - q);
  Vector theta = Vector::Zero(k);
  if (Z.cols() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> ls(D.X * Z);
    theta = Z * ls.solve(y);
  }
  FitResult f = finish(D, y, std::move(theta));
  for (Eigen::Index i = 0; i < q; ++i) f.active.push_back(static_cast<int>(i));
  f.active_rank = static_cast<int>(q);
  // Multipliers of the equality system are unsigned: report stationarity only.
  const Vector g = D.gram * f.theta - D.X.transpose() * y;
  const Vector lambda = D.C.transpose().colPivHouseholderQr().solve(g);
  f.multipliers = lambda;
  f.kkt_residual = (g - D.C.transpose() * lambda).cwiseAbs().maxCoeff() /
                   std::max(1.0, (D.X.transpose() * y).cwiseAbs().maxCoeff());
  return f;
}

ConeProjection project_cone(const Vector& z, const Matrix& gram, const Matrix& C,
                            const QpTolerances& tol) {
  const Vector c = gram * z;
  const auto sol = solve_cone_qp<double>(gram, c, C, tol);
  return ConeProjection{sol.theta, sol.active_rank, sol.active};
}

}  // namespace plrs
