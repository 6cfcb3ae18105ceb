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

// Primal active-set solver for strictly convex quadratic programs over a
// polyhedral cone:
//
//   minimize  1/2 theta' G theta - c' theta   subject to  A theta >= 0.
//
// theta = 0 is always feasible, which gives the method a free starting point.
// The working set is kept linearly independent: a constraint whose normal lies
// in the span of the working set cannot block a step taken inside that span's
// orthogonal complement, so dependent rows never enter.

#pragma once

#include "plrs/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace plrs {

struct QpTolerances {
  double feasibility = 1e-9;
  double active = 1e-8;  // relative to the row norm of A
  double kkt = 1e-8;
  double hard_kkt = 1e-6;  // a residual above this is a solver failure
};

template <typename Scalar>
struct ConeQpSolution {
  VectorX<Scalar> theta;
  VectorX<Scalar> multipliers;  // one per row of A, zero off the working set
  std::vector<int> active;      // rows with |a_i' theta| <= tol
  int active_rank = 0;          // rank of the active rows
  int iterations = 0;
  Scalar kkt_residual = 0;
};

namespace detail {

template <typename Scalar>
int row_rank(const MatrixX<Scalar>& A, const std::vector<int>& rows) {
  if (rows.empty()) return 0;
  MatrixX<Scalar> sub(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(i) = A.row(rows[i]);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(sub);
  qr.setThreshold(Scalar(1e-10));
  return static_cast<int>(qr.rank());
}

template <typename Scalar>
Scalar inf_norm(const VectorX<Scalar>& v) {
  return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Scaled KKT residual of (theta, lambda) for the cone QP: the largest of the
/// stationarity, primal feasibility, dual feasibility and complementarity
/// violations.
template <typename Scalar>
Scalar cone_qp_kkt_residual(const MatrixX<Scalar>& G, const VectorX<Scalar>& c,
                            const MatrixX<Scalar>& A, const VectorX<Scalar>& theta,
                            const VectorX<Scalar>& lambda) {
  using std::abs;
  using std::max;
  const Scalar theta_scale = max(Scalar(1), detail::inf_norm<Scalar>(theta));
  const Scalar grad_scale =
      max({Scalar(1), detail::inf_norm<Scalar>(c), G.cwiseAbs().maxCoeff() * theta_scale});
  VectorX<Scalar> stat = G * theta - c;
  if (A.rows() > 0) stat -= A.transpose() * lambda;
  Scalar res = detail::inf_norm<Scalar>(stat) / grad_scale;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Scalar norm = A.row(i).norm();
    const Scalar slack = A.row(i).dot(theta);
    res = max(res, max(Scalar(0), -slack / norm) / theta_scale);
    res = max(res, max(Scalar(0), -lambda(i)) / grad_scale);
    res = max(res, abs(lambda(i) * slack) / (grad_scale * theta_scale));
  }
  return res;
}

/// Solves min 1/2 theta'G theta - c'theta subject to A theta >= 0.
/// G must be symmetric positive definite. Throws SolverError when the
/// iteration cap (100 k) is hit or the final KKT residual is unacceptable.
template <typename Scalar>
ConeQpSolution<Scalar> solve_cone_qp(const MatrixX<Scalar>& G, const VectorX<Scalar>& c,
                                     const MatrixX<Scalar>& A, const QpTolerances& tol = {}) {
  using std::abs;
  using std::max;
  const Eigen::Index k = G.rows();
  const Eigen::Index q = A.rows();
  if (G.cols() != k || c.size() != k || (q > 0 && A.cols() != k))
    throw SolverError("cone QP: dimension mismatch");

  Eigen::LLT<MatrixX<Scalar>> llt(G);
  if (llt.info() != Eigen::Success) throw SolverError("cone QP: gram matrix is not positive definite");

  ConeQpSolution<Scalar> sol;
  sol.multipliers = VectorX<Scalar>::Zero(q);
  VectorX<Scalar> row_norm(q);
  for (Eigen::Index i = 0; i < q; ++i) row_norm(i) = A.row(i).norm();

  std::vector<int> working;
  VectorX<Scalar> theta = llt.solve(c);
  bool feasible = true;
  {
    const Scalar scale = max(Scalar(1), detail::inf_norm<Scalar>(theta));
    for (Eigen::Index i = 0; i < q; ++i)
      if (A.row(i).dot(theta) < -Scalar(tol.feasibility) * row_norm(i) * scale) feasible = false;
  }

  if (!feasible) {
    theta.setZero();
    const int cap = 100 * static_cast<int>(std::max<Eigen::Index>(k, 1));
    bool done = false;
    while (!done) {
      if (++sol.iterations > cap)
        throw SolverError("cone QP: active-set iteration cap (" + std::to_string(cap) +
                          ") exceeded");
      const VectorX<Scalar> g = G * theta - c;
      const auto w = static_cast<Eigen::Index>(working.size());
      MatrixX<Scalar> Aw(w, k);
      for (Eigen::Index j = 0; j < w; ++j) Aw.row(j) = A.row(working[j]);

      // Null space of the working rows from a QR of Aw'.
      MatrixX<Scalar> Z;
      Eigen::HouseholderQR<MatrixX<Scalar>> qr;
      if (w == 0) {
        Z = MatrixX<Scalar>::Identity(k, k);
      } else {
        qr.compute(Aw.transpose());
        const MatrixX<Scalar> Q = qr.householderQ() * MatrixX<Scalar>::Identity(k, k);
        Z = Q.rightCols(k - w);
      }
      VectorX<Scalar> p = VectorX<Scalar>::Zero(k);
      if (Z.cols() > 0) {
        const MatrixX<Scalar> reduced = Z.transpose() * G * Z;
        p = -Z * reduced.llt().solve(Z.transpose() * g);
      }

      const Scalar theta_scale = max(Scalar(1), detail::inf_norm<Scalar>(theta));
      if (detail::inf_norm<Scalar>(p) <= Scalar(1e-13) * theta_scale) {
        if (w == 0) {
          done = true;
          break;
        }
        // Aw' lambda = g on the working set.
        const MatrixX<Scalar> R = qr.matrixQR().topLeftCorner(w, w).template triangularView<Eigen::Upper>();
        const VectorX<Scalar> qtg = (qr.householderQ().transpose() * g).head(w);
        const VectorX<Scalar> lambda = R.template triangularView<Eigen::Upper>().solve(qtg);
        const Scalar grad_scale = max(Scalar(1), detail::inf_norm<Scalar>(c));
        Eigen::Index drop = -1;
        Scalar most_negative = -Scalar(1e-12) * grad_scale;
        for (Eigen::Index j = 0; j < w; ++j)
          if (lambda(j) < most_negative) {
            most_negative = lambda(j);
            drop = j;
          }
        if (drop < 0) {
          for (Eigen::Index j = 0; j < w; ++j) sol.multipliers(working[j]) = lambda(j);
          done = true;
        } else {
          working.erase(working.begin() + drop);
        }
        continue;
      }

      Scalar step = 1;
      int blocking = -1;
      const Scalar pnorm = p.norm();
      for (Eigen::Index i = 0; i < q; ++i) {
        if (std::find(working.begin(), working.end(), static_cast<int>(i)) != working.end()) continue;
        const Scalar ap = A.row(i).dot(p);
        if (ap < -Scalar(1e-12) * row_norm(i) * pnorm) {
          const Scalar s = max(Scalar(0), -A.row(i).dot(theta) / ap);
          if (s < step) {
            step = s;
            blocking = static_cast<int>(i);
          }
        }
      }
      theta += step * p;
      if (blocking >= 0) {
        working.push_back(blocking);
        std::sort(working.begin(), working.end());
      }
    }
  }

  sol.theta = theta;
  const Scalar theta_scale = max(Scalar(1), detail::inf_norm<Scalar>(theta));
  for (Eigen::Index i = 0; i < q; ++i)
    if (abs(A.row(i).dot(theta)) <= Scalar(tol.active) * row_norm(i) * theta_scale)
      sol.active.push_back(static_cast<int>(i));
  sol.active_rank = detail::row_rank<Scalar>(A, sol.active);
  sol.kkt_residual = cone_qp_kkt_residual<Scalar>(G, c, A, theta, sol.multipliers);
  if (!(sol.kkt_residual <= Scalar(tol.hard_kkt)))
    throw SolverError("cone QP: KKT residual " + std::to_string(static_cast<double>(sol.kkt_residual)) +
                      " above tolerance");
  return sol;
}

}  // namespace plrs
