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

#include "plrs/report.hpp"

#include "plrs/dataset.hpp"
#include "plrs/rng.hpp"
#include "plrs/screen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace plrs {
namespace {

constexpr std::uint64_t kBandStream = 2000;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* state_colour(int s) {
  switch (s) {
    case kLoss: return "#c0392b";
    case kGain: return "#27ae60";
    case kAmp: return "#2c3e90";
    default: return "#333333";
  }
}

std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

}  // namespace

GeneBands gene_bands(const GeneRecord& gene, const Config& config, std::uint64_t seed) {
  gene.validate();
  const std::span<const double> xs(gene.x.data(), static_cast<std::size_t>(gene.size()));
  GeneBands out;
  out.knots = merge_sparse_segments(estimate_knots(gene, config.knot_method), xs,
                                    config.min_obs_per_state_model);
  const auto selection = select_model(xs, gene.y, out.knots, {config.mc_draws, seed});
  const auto& best = selection.best(config.criterion);
  out.selected = best.spec;
  out.selected_theta = best.fit.theta;

  const auto D = build_design(xs, SplineSpec::full(out.knots));
  const auto weights = chibar_weights(D.C, D.gram, config.mc_draws, stream_seed(seed, kBandStream));
  out.grid = band_grid(out.knots, xs, gene.y, weights, config.alpha, config.grid_size);
  const auto labels = out.knots.state_labels();
  for (double x : out.grid.xs) out.grid_states.push_back(labels[out.knots.segment_of(x)]);
  return out;
}

void write_bands_tsv(std::ostream& out, const GeneBands& b) {
  out << "x\tfitted\tlower\tupper\tstate\n";
  for (std::size_t i = 0; i < b.grid.xs.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    out << format_number(b.grid.xs[i]) << '\t' << format_number(b.grid.fitted(j)) << '\t'
        << format_number(b.grid.lower(j)) << '\t' << format_number(b.grid.upper(j)) << '\t'
        << state_name(b.grid_states[i]) << '\n';
  }
}

void write_bands_svg(std::ostream& out, const GeneRecord& gene, const GeneBands& b) {
  constexpr double W = 640, H = 440, L = 64, R = 20, T = 36, B = 52;
  const auto& g = b.grid;
  double xlo = std::min(gene.x.minCoeff(), g.xs.front()), xhi = std::max(gene.x.maxCoeff(), g.xs.back());
  double ylo = std::min(gene.y.minCoeff(), g.lower.minCoeff());
  double yhi = std::max(gene.y.maxCoeff(), g.upper.maxCoeff());
  if (!(xhi > xlo)) xlo -= 0.5, xhi += 0.5;
  if (!(yhi > ylo)) ylo -= 0.5, yhi += 0.5;
  const double padx = 0.03 * (xhi - xlo), pady = 0.05 * (yhi - ylo);
  xlo -= padx, xhi += padx, ylo -= pady, yhi += pady;
  auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << gene.id << " (" << format_number(100 * g.level) << "% uniform band)</text>\n";

  // band
  out << "<polygon fill=\"#c8c8c8\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    out << fmt(px(g.xs[i])) << ',' << fmt(py(g.upper(static_cast<Eigen::Index>(i)))) << ' ';
  for (std::size_t i = g.xs.size(); i-- > 0;)
    out << fmt(px(g.xs[i])) << ',' << fmt(py(g.lower(static_cast<Eigen::Index>(i)))) << ' ';
  out << "\"/>\n";

  // axes and ticks
  out << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << fmt(L) << "\" y1=\"" << fmt(H - B)
      << "\" x2=\"" << fmt(W - R) << "\" y2=\"" << fmt(H - B) << "\"/><line x1=\"" << fmt(L)
      << "\" y1=\"" << fmt(T) << "\" x2=\"" << fmt(L) << "\" y2=\"" << fmt(H - B) << "\"/></g>\n";
  for (double t : ticks(xlo, xhi))
    out << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(H - B + 16)
        << "\" text-anchor=\"middle\">" << format_number(t) << "</text>\n";
  for (double t : ticks(ylo, yhi))
    out << "<text x=\"" << fmt(L - 6) << "\" y=\"" << fmt(py(t) + 4)
        << "\" text-anchor=\"end\">" << format_number(t) << "</text>\n";
  out << "<text x=\"" << fmt((L + W - R) / 2) << "\" y=\"" << fmt(H - 12)
      << "\" text-anchor=\"middle\">DNA copy number (segmented log2 ratio)</text>\n";
  out << "<text transform=\"translate(16," << fmt((T + H - B) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">mRNA expression (log2)</text>\n";

  // knots
  for (double k : b.knots.knots)
    out << "<line x1=\"" << fmt(px(k)) << "\" y1=\"" << fmt(T) << "\" x2=\"" << fmt(px(k))
        << "\" y2=\"" << fmt(H - B) << "\" stroke=\"#888888\" stroke-dasharray=\"2,3\"/>\n";

  // full-model fit and selected model
  auto polyline = [&](const Vector& ys, const char* style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      out << fmt(px(g.xs[i])) << ',' << fmt(py(ys(static_cast<Eigen::Index>(i)))) << ' ';
    out << "\"/>\n";
  };
  polyline(g.fitted, "stroke=\"#555555\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\"");
  polyline(predict(b.selected, b.selected_theta, g.xs), "stroke=\"black\" stroke-width=\"2\"");

  for (Eigen::Index i = 0; i < gene.size(); ++i)
    out << "<circle cx=\"" << fmt(px(gene.x(i))) << "\" cy=\"" << fmt(py(gene.y(i)))
        << "\" r=\"3\" fill=\"" << state_colour(gene.s[i]) << "\"/>\n";
  out << "</svg>\n";
}

}  // namespace plrs
