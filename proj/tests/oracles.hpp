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

// Brute-force reference computations used only by the tests. None of these
// share code paths with the library routines they check.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct QpOracle {
  Vec theta;
  double objective = std::numeric_limits<double>::infinity();
};

/// min 1/2 t'Gt - c't s.t. A t >= 0 by trying every candidate active set:
/// solve the equality-constrained KKT system for each subset, keep the
/// feasible candidates, return the best.
inline QpOracle enumerate_active_sets(const Mat& G, const Vec& c, const Mat& A) {
  const auto k = G.rows();
  const auto q = A.rows();
  QpOracle best;
  for (long mask = 0; mask < (1L << q); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < q; ++i)
      if (mask & (1L << i)) rows.push_back(i);
    const auto w = static_cast<Eigen::Index>(rows.size());
    Mat K = Mat::Zero(k + w, k + w);
    Vec rhs = Vec::Zero(k + w);
    K.topLeftCorner(k, k) = G;
    rhs.head(k) = c;
    for (Eigen::Index j = 0; j < w; ++j) {
      K.block(k + j, 0, 1, k) = A.row(rows[j]);
      K.block(0, k + j, k, 1) = A.row(rows[j]).transpose();
    }
    // Least-squares solve tolerates dependent subsets.
    const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
    const Vec t = sol.head(k);
    if ((K * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    if (q > 0 && (A * t).minCoeff() < -1e-9 * (1.0 + t.norm())) continue;
    const double obj = 0.5 * t.dot(G * t) - c.dot(t);
    if (obj < best.objective) {
      best.objective = obj;
      best.theta = t;
    }
  }
  return best;
}

/// Pseudo-inverse least squares via SVD.
inline Vec svd_least_squares(const Mat& X, const Vec& y) {
  Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(y);
}

/// min ||y - X t||^2 s.t. C t = 0 from the Lagrange (KKT) linear system.
inline Vec equality_ls(const Mat& X, const Vec& y, const Mat& C) {
  const auto k = X.cols(), q = C.rows();
  Mat K = Mat::Zero(k + q, k + q);
  K.topLeftCorner(k, k) = 2.0 * X.transpose() * X;
  K.topRightCorner(k, q) = C.transpose();
  K.bottomLeftCorner(q, k) = C;
  Vec rhs = Vec::Zero(k + q);
  rhs.head(k) = 2.0 * X.transpose() * y;
  return K.fullPivLu().solve(rhs).head(k);
}

/// Adaptive Simpson integration.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 50) {
  const auto step = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi,
                        double whole, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, eps / 2, d - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, eps / 2, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return step(step, a, b, fa, fm, fb, whole, tol, depth);
}

/// P(B <= x), B ~ Beta(a, b) with b >= 1, by quadrature after substituting
/// x = u^(1/a), which removes the singularity at zero.
inline double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double inv_norm = std::exp(-log_beta);
  const auto integrand = [&](double u) {
    const double t = std::pow(u, 1.0 / a);
    return inv_norm / a * std::pow(1.0 - t, b - 1.0);
  };
  return simpson(integrand, 0.0, std::pow(x, a), 1e-13);
}

/// Extremes of a' t over {C t >= 0, ||M(t - c)||^2 <= lambda} for k = 2 by a
/// dense polar grid over the ellipse.
struct GridRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double resolution = 0.0;  // bound on |a'dt| between neighbouring grid points
};

inline GridRange grid_range_2d(const Vec& a, const Vec& center, const Mat& M, double lambda,
                               const Mat& C, int radial = 1000, int angular = 1000) {
  GridRange out;
  const Mat Minv = M.inverse();
  const double root = std::sqrt(lambda);
  for (int i = 0; i <= radial; ++i) {
    const double r = root * i / radial;
    for (int j = 0; j < angular; ++j) {
      const double phi = 2.0 * M_PI * j / angular;
      Vec v(2);
      v << r * std::cos(phi), r * std::sin(phi);
      const Vec t = center + Minv * v;
      if (C.rows() > 0 && (C * t).minCoeff() < 0.0) continue;
      const double val = a.dot(t);
      out.lo = std::min(out.lo, val);
      out.hi = std::max(out.hi, val);
    }
  }
  // Neighbouring points differ by at most root/radial radially and
  // root * 2pi/angular tangentially in v; map to a't through M^-T a.
  const double gain = (Minv.transpose() * a).norm();
  out.resolution = gain * root * (1.0 / radial + 2.0 * M_PI / angular);
  return out;
}

/// Kolmogorov-Smirnov distances of p-values from U(0, 1) and from the exact
/// null law of a mixture p-value with an atom of mass w0 at one (uniform on
/// [0, 1 - w0] plus the atom).
struct KsDistances {
  double uniform = 0.0;
  double null_law = 0.0;
};

inline KsDistances ks_pvalues(std::vector<double> p, double w0) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  const double edge = 1.0 - w0;
  auto law = [&](double t) { return t < edge ? t : (t < 1.0 ? edge : 1.0); };
  auto law_left = [&](double t) { return t <= edge ? t : (t <= 1.0 ? edge : 1.0); };
  KsDistances d;
  // Compare both one-sided limits at every distinct sample value.
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    const double below = i / n, upto = j / n, v = p[i];
    d.uniform = std::max({d.uniform, std::abs(v - below), std::abs(upto - v)});
    d.null_law = std::max({d.null_law, std::abs(law_left(v) - below), std::abs(upto - law(v))});
    i = j;
  }
  const double frac = static_cast<double>(std::lower_bound(p.begin(), p.end(), edge) - p.begin()) / n;
  d.null_law = std::max(d.null_law, std::abs(frac - edge));
  return d;
}

/// min ||A x - b|| subject to x >= 0 (Lawson and Hanson active-set method).
inline Vec nnls(const Mat& A, const Vec& b, int max_iter = 500) {
  const auto k = A.cols();
  Vec x = Vec::Zero(k);
  std::vector<bool> passive(k, false);
  const double tol = 1e-12 * (1.0 + A.norm() * b.norm());
  for (int it = 0; it < max_iter; ++it) {
    const Vec w = A.transpose() * (b - A * x);
    Eigen::Index j = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < k; ++i)
      if (!passive[i] && w(i) > best) best = w(i), j = i;
    if (j < 0) break;
    passive[j] = true;
    for (;;) {
      std::vector<Eigen::Index> P;
      for (Eigen::Index i = 0; i < k; ++i)
        if (passive[i]) P.push_back(i);
      Mat AP(A.rows(), static_cast<Eigen::Index>(P.size()));
      for (std::size_t i = 0; i < P.size(); ++i) AP.col(i) = A.col(P[i]);
      const Vec zP = AP.completeOrthogonalDecomposition().solve(b);
      Vec z = Vec::Zero(k);
      for (std::size_t i = 0; i < P.size(); ++i) z(P[i]) = zP(i);
      double step = 1.0;
      bool clipped = false;
      for (auto i : P)
        if (z(i) <= 0.0) {
          clipped = true;
          step = std::min(step, x(i) / (x(i) - z(i)));
        }
      if (!clipped) {
        x = z;
        break;
      }
      x += step * (z - x);
      for (auto i : P)
        if (x(i) <= 1e-15) passive[i] = false, x(i) = 0.0;
    }
  }
  return x;
}

/// Random symmetric positive definite matrix with bounded condition number.
inline Mat random_spd(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Mat B(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) B(i, j) = N(rng);
  return B * B.transpose() + 0.5 * Mat::Identity(k, k);
}

}  // namespace oracle
