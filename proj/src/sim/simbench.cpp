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

#include "plrs/simbench.hpp"

#include "plrs/bands.hpp"
#include "plrs/cqp.hpp"
#include "plrs/inference.hpp"
#include "plrs/knots.hpp"
#include "plrs/parallel.hpp"
#include "plrs/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace plrs {
namespace {

// Stream identifiers keep the studies independent under a shared seed.
constexpr std::uint64_t kPointDesign = 11;
constexpr std::uint64_t kPointNoise = 12;
constexpr std::uint64_t kCoverage = 21;
constexpr std::uint64_t kShapes = 31;
constexpr std::uint64_t kCorpus = 41;

KnotSet normal_gain(double knot) { return KnotSet{{knot}, {Segment{kNormal, kNormal}, Segment{kGain, kGain}}}; }

double hinge(double x, double knot) { return std::max(x - knot, 0.0); }

double point_truth(int model, double a2, double x) {
  if (model == 1) return 1.0 + a2 * hinge(x, 0.5);
  return 1.0 + 0.5 * x + (a2 - 0.5) * hinge(x, 0.5);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double e : v) m.mean += e;
  m.mean /= n;
  for (double e : v) m.var += (e - m.mean) * (e - m.mean);
  m.var = v.size() > 1 ? m.var / (n - 1.0) : 0.0;
  return m;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<double> point_estimation_design(const PointEstimationOptions& o, int model) {
  if (o.n < 5) throw InputError("point estimation needs n >= 5");
  Engine eng = make_engine(stream_seed(o.seed, kPointDesign), static_cast<std::uint64_t>(model));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x(o.n);
  for (auto& v : x) v = U(eng);
  return x;
}

std::vector<PointEstimationCell> sim_point_estimation(const PointEstimationOptions& o) {
  if (o.reps < 2) throw InputError("point estimation needs at least two replicates");
  for (int m : o.models)
    if (m != 1 && m != 2) throw InputError("point estimation models are 1 and 2");
  std::vector<PointEstimationCell> cells;
  for (int m : o.models)
    for (double a2 : o.a2)
      for (double s : o.sigma) {
        if (!(s >= 0.0)) throw InputError("noise standard deviation must be nonnegative");
        cells.push_back({m, a2, s, o.constrained, o.continuous, o.reps});
      }

  SplineSpec piecewise = SplineSpec::full(normal_gain(0.5));
  if (o.continuous) piecewise.included.reset(jump_position(0));
  // gain slope = theta_1 + theta_{1,1}; column of the hinge in the fit
  const int hinge_col = o.continuous ? 2 : 3;
  struct Designs {
    std::vector<double> x;
    DesignSystem linear, piecewise;
  };
  std::vector<Designs> designs;
  for (int m : {1, 2}) {
    Designs d;
    d.x = point_estimation_design(o, m);
    d.linear = build_design(d.x, SplineSpec{single_state_knots(kNormal), BasisMask(0b11)});
    d.piecewise = build_design(d.x, piecewise);
    designs.push_back(std::move(d));
  }

  parallel_for(cells.size(), o.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const auto& d = designs[cell.model - 1];
    Engine eng = make_engine(stream_seed(o.seed, kPointNoise), c);
    std::normal_distribution<double> N;
    Vector mean(o.n);
    for (int i = 0; i < o.n; ++i) mean(i) = point_truth(cell.model, cell.a2, d.x[i]);
    std::vector<double> lin(o.reps), pw(o.reps);
    Vector y(o.n);
    for (int r = 0; r < o.reps; ++r) {
      for (int i = 0; i < o.n; ++i) y(i) = mean(i) + cell.sigma * N(eng);
      const Vector tl = o.constrained ? fit_inequality(d.linear, y).theta : fit_unconstrained(d.linear, y).theta;
      const Vector tp = o.constrained ? fit_inequality(d.piecewise, y).theta
                                      : fit_unconstrained(d.piecewise, y).theta;
      lin[r] = tl(1);
      pw[r] = tp(1) + tp(hinge_col);
    }
    const auto ml = moments(lin), mp = moments(pw);
    cell.bias2_linear = (ml.mean - cell.a2) * (ml.mean - cell.a2);
    cell.var_linear = ml.var;
    cell.bias2_piecewise = (mp.mean - cell.a2) * (mp.mean - cell.a2);
    cell.var_piecewise = mp.var;
  });
  return cells;
}

double coverage_truth(double x) { return 1.0 + (x > 0.5 ? 1.0 : 0.0) + hinge(x, 0.5); }

std::vector<CoverageCell> sim_coverage(const CoverageOptions& o) {
  if (o.reps < 1) throw InputError("coverage needs at least one replicate");
  if (o.grid < 2) throw InputError("coverage grid needs at least two points");
  for (double a : o.alpha)
    if (!(a > 0.0 && a < 1.0)) throw InputError("alpha must lie strictly between 0 and 1");
  struct Group {
    int n;
    double sigma;
    std::vector<long> covered;
    long redrawn = 0;
  };
  std::vector<Group> groups;
  for (int n : o.n)
    for (double s : o.sigma) {
      if (n < 6) throw InputError("coverage needs n >= 6");
      groups.push_back({n, s, std::vector<long>(o.alpha.size(), 0)});
    }

  const KnotSet knots = normal_gain(0.5);
  const auto spec = SplineSpec::full(knots);
  // One work item per (group, replicate) keeps the schedule balanced.
  const std::size_t reps = static_cast<std::size_t>(o.reps);
  std::vector<std::vector<char>> hit(groups.size() * reps, std::vector<char>(o.alpha.size(), 0));
  std::vector<long> redraws(groups.size() * reps, 0);
  parallel_for(groups.size() * reps, o.threads, [&](std::size_t item) {
    const auto& g = groups[item / reps];
    Engine eng = make_engine(stream_seed(o.seed, kCoverage + 1000 * (item / reps)), item % reps);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N;
    std::vector<double> x(g.n);
    DesignSystem D;
    for (;;) {
      for (auto& v : x) v = U(eng);
      try {
        D = build_design(x, spec);
        break;
      } catch (const InputError&) {
        ++redraws[item];
      }
    }
    Vector y(g.n);
    for (int i = 0; i < g.n; ++i) y(i) = coverage_truth(x[i]) + g.sigma * N(eng);
    const auto weights = chibar_weights(D.C, D.gram, o.mc_draws, eng());
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    std::vector<double> grid(o.grid);
    for (int j = 0; j < o.grid; ++j) grid[j] = *lo + (*hi - *lo) * j / (o.grid - 1);
    for (std::size_t a = 0; a < o.alpha.size(); ++a) {
      const auto band = band_grid(knots, x, y, weights, o.alpha[a], o.grid, grid);
      bool inside = true;
      for (int j = 0; j < o.grid && inside; ++j) {
        const double t = coverage_truth(band.xs[j]);
        inside = band.lower(j) <= t && t <= band.upper(j);
      }
      hit[item][a] = inside;
    }
  });

  std::vector<CoverageCell> out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    long redrawn = 0;
    std::vector<long> covered(o.alpha.size(), 0);
    for (std::size_t r = 0; r < reps; ++r) {
      redrawn += redraws[gi * reps + r];
      for (std::size_t a = 0; a < o.alpha.size(); ++a) covered[a] += hit[gi * reps + r][a];
    }
    for (std::size_t a = 0; a < o.alpha.size(); ++a)
      out.push_back({groups[gi].n, groups[gi].sigma, o.alpha[a], o.reps, covered[a], redrawn});
  }
  return out;
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::Null: return "null";
    case Shape::Linear: return "linear";
    case Shape::PiecewiseLevel: return "level";
    case Shape::Partial: return "partial";
  }
  return "?";
}

Shape parse_shape(std::string_view s) {
  for (Shape v : {Shape::Null, Shape::Linear, Shape::PiecewiseLevel, Shape::Partial})
    if (s == to_string(v)) return v;
  throw InputError("unknown shape '" + std::string(s) + "' (null, linear, level, partial)");
}

namespace {

constexpr double kGainBoundary = 0.2;

/// One sample of the three-state design used by the shape study.
void draw_shape_sample(Engine& eng, double* x, int* s) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double u = U(eng);
  if (u < 0.2) {
    *s = kLoss;
    *x = -1.0 + 0.75 * U(eng);
  } else if (u < 0.7) {
    *s = kNormal;
    *x = -0.15 + 0.3 * U(eng);
  } else {
    *s = kGain;
    *x = 0.25 + 0.75 * U(eng);
  }
}

double shape_mean(Shape shape, double b, double x, int s) {
  switch (shape) {
    case Shape::Null: return 0.0;
    case Shape::Linear: return b * x;
    case Shape::PiecewiseLevel: return s >= kGain ? b : 0.0;
    case Shape::Partial: return b * hinge(x, kGainBoundary);
  }
  return 0.0;
}

}  // namespace

std::vector<ShapeReplicates> sim_shape_pvalues(const ShapeOptions& o) {
  if (o.reps < 1) throw InputError("shape study needs at least one replicate");
  if (o.n < 10) throw InputError("shape study needs n >= 10");
  std::vector<ShapeReplicates> groups;
  auto add = [&](Shape sh, double b) {
    ShapeReplicates g;
    g.shape = sh;
    g.effect = b;
    groups.push_back(std::move(g));
  };
  for (Shape sh : o.shapes) {
    if (sh == Shape::Null)
      add(sh, 0.0);
    else
      for (double b : o.effects) add(sh, b);
  }
  const std::size_t reps = static_cast<std::size_t>(o.reps);
  for (auto& g : groups) {
    g.p_plrs.assign(reps, std::numeric_limits<double>::quiet_NaN());
    g.p_lm.assign(reps, 1.0);
    g.w0.assign(reps, std::numeric_limits<double>::quiet_NaN());
    g.states.assign(reps, 0);
  }
  parallel_for(groups.size() * reps, o.threads, [&](std::size_t item) {
    auto& g = groups[item / reps];
    const std::size_t r = item % reps;
    Engine eng = make_engine(stream_seed(o.seed, kShapes + 1000 * (item / reps)), r);
    std::normal_distribution<double> N;
    std::vector<double> x(o.n);
    std::vector<int> s(o.n);
    Vector y(o.n);
    for (int i = 0; i < o.n; ++i) {
      draw_shape_sample(eng, &x[i], &s[i]);
      y(i) = shape_mean(g.shape, g.effect, x[i], s[i]) + o.sigma * N(eng);
    }
    const std::uint64_t wseed = eng();
    g.p_lm[r] = lm_test(x, y).pvalue;
    try {
      const auto knots = merge_sparse_segments(knots_from_calls(x, s), x, o.min_obs_per_state);
      const auto D = build_design(x, SplineSpec::full(knots));
      const auto t = plrs_test(D, y, o.mc_draws, wseed);
      g.p_plrs[r] = t.pvalue;
      g.w0[r] = t.weights_used.w(0);
      g.states[r] = knots.num_states();
    } catch (const InputError&) {
    }
  });
  return groups;
}

std::vector<ShapeCell> sim_test_shapes(const ShapeOptions& o) {
  std::vector<ShapeCell> out;
  for (const auto& g : sim_shape_pvalues(o))
    for (double a : o.alpha) {
      ShapeCell c{g.shape, g.effect, a, o.reps};
      for (std::size_t r = 0; r < g.p_lm.size(); ++r) {
        if (std::isnan(g.p_plrs[r]))
          ++c.untested;
        else
          c.rejected_plrs += g.p_plrs[r] <= a;
        c.rejected_lm += g.p_lm[r] <= a;
      }
      out.push_back(c);
    }
  return out;
}

Corpus sim_corpus(const CorpusOptions& o) {
  if (o.genes < 0 || o.samples < 10) throw InputError("corpus needs genes >= 0 and samples >= 10");
  // State centres and kernel width of the call-probability model; hard calls
  // are the most probable state, so they are ordered in copy number.
  constexpr std::array<double, 4> centre{-0.6, 0.0, 0.6, 1.5};
  constexpr std::array<double, 4> lo{-1.1, -0.2, 0.2, 1.0};
  constexpr std::array<double, 4> hi{-0.2, 0.2, 1.0, 2.2};
  constexpr double width = 0.25;
  // intercept, simple linear, piecewise level, piecewise linear
  constexpr std::array<double, 4> class_share{0.4, 0.15, 0.2, 0.25};

  Corpus c;
  for (int j = 0; j < o.samples; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%03d", j + 1);
    c.data.samples.push_back(buf);
  }
  c.data.has_probabilities = true;
  for (int g = 0; g < o.genes; ++g) {
    Engine eng = make_engine(stream_seed(o.seed, kCorpus), static_cast<std::uint64_t>(g));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N;
    double u = U(eng);
    int cls = 0;
    while (cls < 3 && u >= class_share[cls]) u -= class_share[cls++];
    std::array<double, 4> share{U(eng) < 0.6 ? 0.1 + 0.2 * U(eng) : 0.0, 0.0, 0.1 + 0.25 * U(eng),
                                U(eng) < 0.3 ? 0.03 + 0.07 * U(eng) : 0.0};
    share[1] = 1.0 - share[0] - share[2] - share[3];
    const double mu = 5.0 + 5.0 * U(eng);
    const double b = cls == 1 ? 0.8 + 1.2 * U(eng) : cls == 2 ? 1.0 + U(eng) : 2.0 + 2.0 * U(eng);

    GeneRecord rec;
    char id[16];
    std::snprintf(id, sizeof id, "G%04d", g + 1);
    rec.id = id;
    rec.sample_ids = c.data.samples;
    rec.x.resize(o.samples);
    rec.y.resize(o.samples);
    rec.s.resize(o.samples);
    Matrix P(o.samples, 4);
    for (;;) {
      for (int i = 0; i < o.samples; ++i) {
        double v = U(eng);
        int st = 0;
        while (st < 3 && v >= share[st]) v -= share[st++];
        const double x = lo[st] + (hi[st] - lo[st]) * U(eng);
        rec.x(i) = x;
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
          P(i, k) = std::exp(-0.5 * std::pow((x - centre[k]) / width, 2));
          total += P(i, k);
        }
        P.row(i) /= total;
        Eigen::Index best = 0;
        P.row(i).maxCoeff(&best);
        rec.s[i] = static_cast<int>(best) + kLoss;
      }
      try {
        rec.states_present();
        break;
      } catch (const InputError&) {
        // a gap in the called states; redraw the copy numbers
      }
    }
    // Truth is expressed in copy number; the gain boundary of the call
    // model sits at 0.3.
    for (int i = 0; i < o.samples; ++i) {
      const double x = rec.x(i);
      double f = mu;
      if (cls == 1) f += b * x;
      if (cls == 2) f += x > 0.3 ? b : 0.0;
      if (cls == 3) f += b * hinge(x, 0.3);
      rec.y(i) = f + o.sigma * N(eng);
    }
    rec.callprobs = std::move(P);
    c.data.genes.push_back(std::move(rec));
    c.truth.push_back(static_cast<ModelClass>(cls));
  }
  return c;
}

void write_point_table(std::ostream& out, const std::vector<PointEstimationCell>& cells) {
  out << "model\ta2\tsigma\tconstrained\tcontinuous\treps\tbias2_linear\tvar_linear\tbias2_piecewise\tvar_piecewise\n";
  for (const auto& c : cells)
    out << c.model << '\t' << num(c.a2) << '\t' << num(c.sigma) << '\t' << (c.constrained ? 1 : 0)
        << '\t' << (c.continuous ? 1 : 0) << '\t' << c.reps << '\t' << num(c.bias2_linear) << '\t' << num(c.var_linear) << '\t'
        << num(c.bias2_piecewise) << '\t' << num(c.var_piecewise) << '\n';
}

void write_coverage_table(std::ostream& out, const std::vector<CoverageCell>& cells) {
  out << "n\tsigma\talpha\treps\tcovered\tcoverage\tredrawn\n";
  for (const auto& c : cells)
    out << c.n << '\t' << num(c.sigma) << '\t' << num(c.alpha) << '\t' << c.reps << '\t'
        << c.covered << '\t' << num(c.coverage()) << '\t' << c.redrawn << '\n';
}

void write_shape_table(std::ostream& out, const std::vector<ShapeCell>& cells) {
  out << "shape\teffect\talpha\treps\tuntested\tpower_plrs\tpower_lm\n";
  for (const auto& c : cells)
    out << to_string(c.shape) << '\t' << num(c.effect) << '\t' << num(c.alpha) << '\t' << c.reps
        << '\t' << c.untested << '\t' << num(c.power_plrs()) << '\t' << num(c.power_lm()) << '\n';
}

void write_corpus_truth(std::ostream& out, const Corpus& corpus) {
  out << "gene_id\ttrue_class\n";
  for (std::size_t g = 0; g < corpus.truth.size(); ++g)
    out << corpus.data.genes[g].id << '\t' << to_string(corpus.truth[g]) << '\n';
}

}  // namespace plrs
