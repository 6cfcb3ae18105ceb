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

#include "plrs/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace plrs {
namespace {

constexpr int kMaxRows = 2 * kMaxCoefficients;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRows, kMaxRows>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRows, 1>;

constexpr long kChunk = 1024;

bool full_row_rank(const Matrix& C) {
  Eigen::ColPivHouseholderQR<Matrix> qr(C);
  qr.setThreshold(1e-10);
  return qr.rank() == C.rows();
}

/// Correlation matrix of C theta for theta ~ N(0, G^-1).
Matrix constraint_correlation(const Matrix& C, const Matrix& gram) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw InputError("gram matrix is not positive definite");
  const Matrix V = C * llt.solve(C.transpose());
  const Vector d = V.diagonal().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * V * d.asDiagonal();
}

/// Dual Lawson-Hanson for projecting onto the cone: find lambda >= 0 with
/// s = u + R lambda >= 0 and lambda's = 0 (min 1/2 l'Rl + u'l, l >= 0). R may
/// be singular; columns entering the passive set stay independent. Returns
/// the slack s; `positive` receives the number of nonzero multipliers.
SmallVector dual_slack(const SmallMatrix& R, const SmallVector& u, int* positive) {
  const int p = static_cast<int>(u.size());
  SmallVector lambda = SmallVector::Zero(p);
  std::array<bool, kMaxRows> in_set{};
  std::array<int, kMaxRows> idx{};
  constexpr double tol = 1e-12;
  for (int outer = 0; outer < 10 * p + 10; ++outer) {
    const SmallVector s = u + R * lambda;
    int enter = -1;
    double most = -tol;
    for (int i = 0; i < p; ++i)
      if (!in_set[i] && s(i) < most) {
        most = s(i);
        enter = i;
      }
    if (enter < 0) break;
    in_set[enter] = true;
    for (int inner = 0; inner < 10 * p + 10; ++inner) {
      int m = 0;
      for (int i = 0; i < p; ++i)
        if (in_set[i]) idx[m++] = i;
      SmallMatrix Rpp(m, m);
      SmallVector rhs(m);
      for (int a = 0; a < m; ++a) {
        rhs(a) = -u(idx[a]);
        for (int b = 0; b < m; ++b) Rpp(a, b) = R(idx[a], idx[b]);
      }
      const SmallVector zeta = Rpp.ldlt().solve(rhs);
      if ((zeta.array() > tol).all()) {
        for (int a = 0; a < m; ++a) lambda(idx[a]) = zeta(a);
        break;
      }
      double alpha = 1.0;
      for (int a = 0; a < m; ++a) {
        const int i = idx[a];
        if (zeta(a) <= tol) alpha = std::min(alpha, lambda(i) / (lambda(i) - zeta(a)));
      }
      for (int a = 0; a < m; ++a) {
        const int i = idx[a];
        lambda(i) += alpha * (zeta(a) - lambda(i));
        if (lambda(i) <= tol) {
          lambda(i) = 0.0;
          in_set[i] = false;
        }
      }
    }
  }
  *positive = 0;
  for (int i = 0; i < p; ++i) *positive += in_set[i] ? 1 : 0;
  return u + R * lambda;
}

/// Rank of the rows with zero slack, from their correlation block.
int active_rank(const SmallMatrix& R, const SmallVector& slack, double tol) {
  const int p = static_cast<int>(slack.size());
  std::array<int, kMaxRows> idx{};
  int m = 0;
  for (int i = 0; i < p; ++i)
    if (slack(i) <= tol) idx[m++] = i;
  if (m == 0) return 0;
  SmallMatrix Rss(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) Rss(a, b) = R(idx[a], idx[b]);
  Eigen::FullPivLU<SmallMatrix> lu(Rss);
  lu.setThreshold(1e-8);
  return static_cast<int>(lu.rank());
}

ChibarWeights finalize(int p, const std::vector<long>& counts, long n_draws) {
  ChibarWeights out;
  out.p = p;
  out.exact = false;
  out.n_draws = n_draws;
  out.w = Vector::Zero(p + 1);
  for (int h = 0; h <= p; ++h) out.w(h) = static_cast<double>(counts[h]) / n_draws;
  out.w /= out.w.sum();
  for (int h = 0; h <= p; ++h)
    out.mc_se = std::max(out.mc_se, std::sqrt(out.w(h) * (1.0 - out.w(h)) / n_draws));
  return out;
}

}  // namespace

double ChibarWeights::expected_dimension(int k) const {
  double total = 0.0;
  for (int h = 0; h <= p; ++h) total += w(h) * (k - p + h);
  return total;
}

ChibarWeights weights_exact_small(const Matrix& C, const Matrix& gram) {
  const auto p = static_cast<int>(C.rows());
  if (p > 2) throw InputError("closed-form level probabilities need p <= 2");
  ChibarWeights out;
  out.p = p;
  out.exact = true;
  if (p == 0) {
    out.w = Vector::Ones(1);
  } else if (p == 1) {
    out.w = Vector::Constant(2, 0.5);
  } else {
    const Matrix R = constraint_correlation(C, gram);
    const double rho = std::clamp(R(0, 1), -1.0, 1.0);
    if (std::abs(rho) > 1.0 - 1e-12)
      throw InputError("constraint rows are collinear in the metric");
    const double w2 = 0.5 - std::acos(rho) / (2.0 * std::numbers::pi);
    out.w = Vector(3);
    out.w << 0.5 - w2, 0.5, w2;
  }
  return out;
}

ChibarWeights weights_mc(const Matrix& C, const Matrix& gram, long n_draws, std::uint64_t seed) {
  if (n_draws < 1) throw InputError("need at least one Monte Carlo draw");
  const auto p = static_cast<int>(C.rows());
  const auto k = gram.rows();
  std::vector<long> counts(p + 1, 0);
  if (p == 0) {
    counts[0] = n_draws;
    return finalize(0, counts, n_draws);
  }
  const long chunks = (n_draws + kChunk - 1) / kChunk;

  if (p > kMaxRows) throw InputError("too many constraint rows for level probabilities");
  int positive = 0;
  if (full_row_rank(C)) {
    const Matrix R = constraint_correlation(C, gram);
    const Matrix L = R.llt().matrixL();
    const SmallMatrix Rs = R;
    const SmallMatrix Ls = L;
    SmallVector e(p);
    for (long chunk = 0; chunk < chunks; ++chunk) {
      Engine eng = make_engine(seed, static_cast<std::uint64_t>(chunk));
      std::normal_distribution<double> normal;
      const long todo = std::min(kChunk, n_draws - chunk * kChunk);
      for (long d = 0; d < todo; ++d) {
        for (int i = 0; i < p; ++i) e(i) = normal(eng);
        const SmallVector u = Ls * e;
        dual_slack(Rs, u, &positive);
        ++counts[p - positive];
      }
    }
    return finalize(p, counts, n_draws);
  }

  // Dependent rows: the correlation matrix is singular, so draw in
  // coefficient space, u = A e with A = D C L^-T, and count the rank of the
  // rows that bind rather than the number of positive multipliers.
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw InputError("gram matrix is not positive definite");
  Matrix A = llt.matrixL().solve(C.transpose()).transpose();
  for (Eigen::Index i = 0; i < p; ++i) A.row(i) /= A.row(i).norm();
  const SmallMatrix Rs = A * A.transpose();
  const SmallMatrix As = A;
  SmallVector e(k);
  for (long chunk = 0; chunk < chunks; ++chunk) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(chunk));
    std::normal_distribution<double> normal;
    const long todo = std::min(kChunk, n_draws - chunk * kChunk);
    for (long d = 0; d < todo; ++d) {
      for (Eigen::Index i = 0; i < k; ++i) e(i) = normal(eng);
      const SmallVector u = As * e;
      const SmallVector slack = dual_slack(Rs, u, &positive);
      ++counts[p - active_rank(Rs, slack, 1e-9 * (1.0 + e.norm()))];
    }
  }
  return finalize(p, counts, n_draws);
}

ChibarWeights chibar_weights(const Matrix& C, const Matrix& gram, long n_draws,
                             std::uint64_t seed) {
  if (C.rows() <= 2) {
    try {
      return weights_exact_small(C, gram);
    } catch (const InputError&) {
    }
  }
  return weights_mc(C, gram, n_draws, seed);
}

}  // namespace plrs
