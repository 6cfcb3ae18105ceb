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

#include "plrs/config.hpp"
#include "plrs/dataset.hpp"
#include "plrs/report.hpp"
#include "plrs/rng.hpp"
#include "plrs/screen.hpp"

#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace plrs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("plrs_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& body) const {
    const auto p = (path / name).string();
    std::ofstream(p) << body;
    return p;
  }
};

const char* kExpr =
    "id\ts1\ts2\ts3\ts4\ts5\n"
    "gA\t1.5\t2.0\t2.5\t3.0\t3.5\n"
    "gB\t0.1\t0.2\t0.3\t0.4\t0.5\n"
    "gC\t5\t5\t6\t7\t8\n";
const char* kSeg =
    "id\ts1\ts2\ts3\ts4\ts5\n"
    "gA\t-0.1\t0.0\t0.1\t0.5\t0.6\n"
    "gB\t-0.5\t-0.4\t0.0\t0.1\t0.2\n"
    "gC\t0\t0.05\t0.1\t0.7\t0.9\n";
const char* kCalls =
    "id\ts1\ts2\ts3\ts4\ts5\n"
    "gA\t0\t0\t0\t1\t1\n"
    "gB\t-1\t-1\t0\t0\t0\n"
    "gC\t0\t0\t0\t1\t1\n";

/// Genes with calls from disjoint copy-number ranges and a chosen mean.
Dataset synthetic(int genes, int n, std::uint64_t seed, double slope) {
  Dataset d;
  for (int j = 0; j < n; ++j) d.samples.push_back("s" + std::to_string(j));
  for (int g = 0; g < genes; ++g) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(g));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N;
    GeneRecord r;
    r.id = "g" + std::to_string(g);
    r.sample_ids = d.samples;
    r.x.resize(n);
    r.y.resize(n);
    r.s.resize(n);
    for (int i = 0; i < n; ++i) {
      const double u = U(eng);
      r.s[i] = u < 0.2 ? kLoss : (u < 0.65 ? kNormal : kGain);
      r.x(i) = r.s[i] == kLoss ? -1.0 + 0.7 * U(eng) : (r.s[i] == kNormal ? -0.2 + 0.4 * U(eng) : 0.3 + 0.7 * U(eng));
      r.y(i) = 3.0 + slope * std::max(r.x(i) - 0.25, 0.0) + 0.5 * N(eng);
    }
    d.genes.push_back(std::move(r));
  }
  return d;
}

Config fast_config() {
  Config c;
  c.mc_draws = 2000;
  return c;
}

std::string rows_text(const ScreenResult& r) {
  std::ostringstream os;
  write_rows(os, r.rows);
  write_rejects(os, r.rejects);
  return os.str();
}

}  // namespace

TEST_CASE("ingest round trip of a toy data set") {
  TempDir dir("toy");
  IngestPaths p{dir.write("e.tsv", kExpr), dir.write("s.tsv", kSeg), dir.write("c.tsv", kCalls)};
  const auto d = ingest(p);
  REQUIRE(d.genes.size() == 3);
  for (const auto& g : d.genes) CHECK(g.size() == 5);
  CHECK(d.genes[0].id == "gA");
  CHECK(d.genes[1].y(4) == 0.5);
  CHECK(d.genes[1].x(0) == -0.5);
  CHECK(d.genes[1].s[0] == kLoss);
  CHECK(d.samples == std::vector<std::string>{"s1", "s2", "s3", "s4", "s5"});
  CHECK(d.dropped_missing.empty());
  CHECK(d.index_of("gC") == 2);
  CHECK_THROWS_AS(d.index_of("gZ"), InputError);

  write_dataset(d, (dir.path / "rt_").string());
  const auto back = ingest({(dir.path / "rt_expr.tsv").string(), (dir.path / "rt_seg.tsv").string(),
                            (dir.path / "rt_calls.tsv").string()});
  REQUIRE(back.genes.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) {
    CHECK(back.genes[g].y == d.genes[g].y);
    CHECK(back.genes[g].x == d.genes[g].x);
    CHECK(back.genes[g].s == d.genes[g].s);
  }
}

TEST_CASE("missing cells drop the feature and are counted") {
  TempDir dir("missing");
  std::string expr = kExpr;
  expr.replace(expr.find("0.3"), 3, "NA");
  IngestPaths p{dir.write("e.tsv", expr), dir.write("s.tsv", kSeg), dir.write("c.tsv", kCalls)};
  const auto d = ingest(p);
  CHECK(d.genes.size() == 2);
  CHECK(d.dropped_missing == std::vector<std::string>{"gB"});
  const auto r = screen(d, fast_config());
  CHECK(static_cast<long>(r.rows.size() + r.rejects.size()) == r.input_genes);
  CHECK(r.input_genes == 3);
}

TEST_CASE("ingest errors") {
  TempDir dir("errors");
  const auto e = dir.write("e.tsv", kExpr), s = dir.write("s.tsv", kSeg), c = dir.write("c.tsv", kCalls);
  SUBCASE("sample order mismatch is a hard error") {
    std::string seg = kSeg;
    seg.replace(seg.find("s1\ts2"), 5, "s2\ts1");
    CHECK_THROWS_AS(ingest({e, dir.write("s2.tsv", seg), c}), InputError);
  }
  SUBCASE("unparseable number names file, line and column") {
    std::string expr = kExpr;
    expr.replace(expr.find("2.5"), 3, "2.x");
    try {
      ingest({dir.write("bad.tsv", expr), s, c});
      FAIL("expected an error");
    } catch (const InputError& err) {
      CHECK(std::string(err.what()).find("bad.tsv:2:4") != std::string::npos);
    }
  }
  SUBCASE("duplicate IDs") {
    CHECK_THROWS_AS(ingest({dir.write("dup.tsv", std::string(kExpr) + "gA\t1\t2\t3\t4\t5\n"), s, c}),
                    InputError);
  }
  SUBCASE("calls outside the state codes") {
    std::string calls = kCalls;
    calls.replace(calls.find("-1"), 2, "-2");
    CHECK_THROWS_AS(ingest({e, s, dir.write("c2.tsv", calls)}), InputError);
  }
  SUBCASE("unmatched features are reported, not fatal") {
    std::string seg = kSeg;
    seg.erase(seg.find("gC"));
    const auto d = ingest({e, dir.write("s3.tsv", seg), c});
    CHECK(d.genes.size() == 2);
    CHECK(d.unmatched == std::vector<std::string>{"gC"});
  }
  SUBCASE("no calls and no probabilities") { CHECK_THROWS_AS(ingest({e, s, ""}), InputError); }
}

TEST_CASE("probability inputs: four files, long format and derived calls agree") {
  TempDir dir("probs");
  const auto e = dir.write("e.tsv", kExpr), s = dir.write("s.tsv", kSeg);
  const char* names[] = {"loss", "normal", "gain", "amp"};
  // gA: normal, normal, normal, gain, gain with soft memberships
  std::array<std::string, 4> four;
  std::ostringstream lng;
  lng << "feature_id\tsample_id\tp_loss\tp_normal\tp_gain\tp_amp\n";
  const double pn[5] = {0.9, 0.8, 0.6, 0.2, 0.1};
  for (int c = 0; c < 4; ++c) {
    std::ostringstream t;
    t << "id\ts1\ts2\ts3\ts4\ts5\n";
    for (const char* g : {"gA", "gB", "gC"}) {
      t << g;
      for (int i = 0; i < 5; ++i) {
        const double v = c == 1 ? pn[i] : (c == 2 ? 1.0 - pn[i] : 0.0);
        t << '\t' << v;
      }
      t << '\n';
    }
    four[c] = dir.write(std::string(names[c]) + ".tsv", t.str());
  }
  for (const char* g : {"gA", "gB", "gC"})
    for (int i = 0; i < 5; ++i)
      lng << g << "\ts" << i + 1 << "\t0\t" << pn[i] << '\t' << 1.0 - pn[i] << "\t0\n";
  IngestPaths pf{e, s, "", four, ""};
  IngestPaths pl{e, s, "", {}, dir.write("long.tsv", lng.str())};
  const auto a = ingest(pf), b = ingest(pl);
  REQUIRE(a.genes.size() == 3);
  REQUIRE(b.genes.size() == 3);
  CHECK(a.has_probabilities);
  for (std::size_t g = 0; g < 3; ++g) {
    CHECK(*a.genes[g].callprobs == *b.genes[g].callprobs);
    CHECK(a.genes[g].s == std::vector<int>{0, 0, 0, 1, 1});
  }
  IngestPaths partial{e, s, "", {four[0], four[1], "", ""}, ""};
  CHECK_THROWS_AS(ingest(partial), InputError);
}

TEST_CASE("configuration layering: file, then environment, then overrides") {
  TempDir dir("config");
  const auto file = dir.write("run.conf",
                              "# comment\nalpha = 0.2\ncriterion=bic\nseed=7   # trailing\n\n");
  ::unsetenv("PLRS_ALPHA");
  ::unsetenv("PLRS_SEED");
  auto c = load_config(file, {});
  CHECK(c.alpha == 0.2);
  CHECK(c.criterion == Criterion::BIC);
  CHECK(c.seed == 7);
  CHECK(c.knot_method == 1);
  CHECK(c.min_obs_per_state_model == 3);
  CHECK(c.min_obs_per_state_test == 5);
  CHECK(c.fdr_threshold == 0.1);

  ::setenv("PLRS_ALPHA", "0.3", 1);
  ::setenv("PLRS_SEED", "9", 1);
  c = load_config(file, {});
  CHECK(c.alpha == 0.3);
  CHECK(c.seed == 9);
  c = load_config(file, {{"alpha", "0.4"}});
  CHECK(c.alpha == 0.4);
  CHECK(c.seed == 9);
  ::setenv("PLRS_ALPHA", "1.5", 1);
  CHECK_THROWS_AS(load_config(file, {}), InputError);
  ::unsetenv("PLRS_ALPHA");
  ::unsetenv("PLRS_SEED");

  Config k;
  CHECK_THROWS_AS(set_option(k, "bogus", "1"), InputError);
  CHECK_THROWS_AS(set_option(k, "knot_method", "3"), InputError);
  CHECK_THROWS_AS(set_option(k, "threads", "two"), InputError);
  CHECK_THROWS_AS(load_config(dir.write("bad.conf", "alpha\n"), {}), InputError);
  // to_string round-trips through the parser
  Config r = c;
  for (const auto& line : std::vector<std::string>{"knot_method=2", "criterion=aic"}) {
    const auto eq = line.find('=');
    set_option(r, line.substr(0, eq), line.substr(eq + 1));
  }
  const auto text = dir.write("rt.conf", to_string(r));
  ::unsetenv("PLRS_KNOT_METHOD");
  CHECK(to_string(load_config(text, {})) == to_string(r));
}

TEST_CASE("empty data set gives an empty screen") {
  Dataset d;
  const auto r = screen(d, fast_config());
  CHECK(r.rows.empty());
  CHECK(r.rejects.empty());
  CHECK(r.summary == ScreenSummary{});
  CHECK_FALSE(r.all_failed_in_solver);
  std::ostringstream os;
  write_rows(os, r.rows);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
}

TEST_CASE("screen bookkeeping, determinism and audit") {
  TempDir dir("screen");
  auto d = synthetic(12, 40, 3, 3.0);
  // One gene with too few observations per state to fit anything.
  d.genes[5].y.conservativeResize(3);
  d.genes[5].x.conservativeResize(3);
  d.genes[5].s.resize(3);
  d.genes[5].sample_ids.resize(3);
  auto c = fast_config();
  const auto a = screen(d, c);
  CHECK(static_cast<long>(a.rows.size() + a.rejects.size()) == a.input_genes);
  c.threads = 3;
  const auto b = screen(d, c);
  CHECK(rows_text(a) == rows_text(b));
  CHECK(a.summary == b.summary);

  for (const auto& row : a.rows) {
    // coefficient NaN pattern follows the model mask
    for (int pos = 0; pos < 8; ++pos) {
      const bool in_mask = pos < static_cast<int>(row.model.size()) && row.model[pos] == '1';
      CHECK(std::isnan(row.coefficients(pos)) == !in_mask);
    }
    if (!std::isnan(row.pvalue)) {
      CHECK(row.qvalue >= row.pvalue);
      CHECK(row.qvalue <= 1.0);
    }
  }
  const auto path = (dir.path / "rows.tsv").string();
  {
    std::ofstream out(path);
    write_rows(out, a.rows);
  }
  CHECK(summarize_rows_file(path, a.summary.rejects, c.fdr_threshold) == a.summary);
  std::ostringstream sum;
  write_summary(sum, a.summary, true);
  CHECK(sum.str().find("audit\trows_file\tconsistent\t1") != std::string::npos);
  CHECK(render_summary(a.summary).find("piecewise-linear") != std::string::npos);
}

TEST_CASE("null genes give few discoveries; signal genes select piecewise models") {
  const auto null = synthetic(100, 40, 101, 0.0);
  const auto r = screen(null, fast_config());
  MESSAGE("null discoveries at q<0.1: " << r.summary.discoveries_full);
  CHECK(r.summary.tested == 100);
  CHECK(r.summary.discoveries_full <= 10);

  auto mixed = synthetic(50, 40, 202, 4.0);
  for (auto& g : null.genes)
    if (mixed.genes.size() < 100) mixed.genes.push_back(g);
  const auto m = screen(mixed, fast_config());
  int piecewise = 0;
  for (int i = 0; i < 50; ++i) {
    const auto cls = m.rows[i].classes[0];
    piecewise += cls == ModelClass::PiecewiseLinear || cls == ModelClass::PiecewiseLevel;
  }
  MESSAGE("signal genes with a piecewise selection: " << piecewise << "/50");
  CHECK(piecewise > 25);
}

TEST_CASE("band emission") {
  const auto d = synthetic(2, 40, 5, 3.0);
  auto c = fast_config();
  c.grid_size = 25;
  const auto b = gene_bands(d.genes[0], c, 1);
  REQUIRE(b.grid.xs.size() == 25);
  for (std::size_t i = 0; i < 25; ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    CHECK(b.grid.lower(j) <= b.grid.fitted(j) + 1e-9);
    CHECK(b.grid.fitted(j) <= b.grid.upper(j) + 1e-9);
  }
  std::ostringstream t1, t2, s1, s2;
  write_bands_tsv(t1, b);
  write_bands_svg(s1, d.genes[0], b);
  const auto again = gene_bands(d.genes[0], c, 1);
  write_bands_tsv(t2, again);
  write_bands_svg(s2, d.genes[0], again);
  CHECK(t1.str() == t2.str());
  CHECK(s1.str() == s2.str());
  CHECK(t1.str().rfind("x\tfitted\tlower\tupper\tstate\n", 0) == 0);
  CHECK(s1.str().find("<svg") == 0);

  // alpha -> 1 collapses the band onto the fit
  c.alpha = 1.0 - 1e-12;
  const auto thin = gene_bands(d.genes[0], c, 1);
  const double scale = 1.0 + thin.grid.fitted.cwiseAbs().maxCoeff();
  CHECK((thin.grid.upper - thin.grid.lower).maxCoeff() < 1e-6 * scale);
  CHECK((thin.grid.fitted - thin.grid.lower).cwiseAbs().maxCoeff() < 1e-6 * scale);
}
