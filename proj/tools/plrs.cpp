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

// plrs: screen, fit, bands and simulate subcommands.

#include "plrs/config.hpp"
#include "plrs/dataset.hpp"
#include "plrs/report.hpp"
#include "plrs/screen.hpp"
#include "plrs/simbench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

constexpr const char* kFooter = R"(Configuration: defaults < --config file (key=value) < PLRS_<KEY> environment
variables < --set key=value and the per-key flags. Keys: knot_method (1|2),
criterion (osaic|aic|bic), min_obs_per_state_model, min_obs_per_state_test,
alpha, fdr_threshold, mc_draws, seed, threads, grid_size.

screen writes <out>.rows.tsv, <out>.rejects.tsv and <out>.summary.tsv.
rows columns: gene_id n states knots merged class_osaic class_aic class_bic
  model osaic aic bic theta_0 theta_1 theta_1_0 theta_1_1 theta_2_0 theta_2_1
  theta_3_0 theta_3_1 ebar pvalue qvalue lm_slope lm_pvalue lm_qvalue flags
rejects columns: gene_id stage reason
summary columns: table row column value
bands writes <out>.tsv (x fitted lower upper state) and <out>.svg.
Missing values are written as NA. See FORMATS.md for details.

Exit codes: 0 success (warnings allowed), 2 input error, 3 solver failure on
every gene.)";

struct InputOptions {
  plrs::IngestPaths paths;
  void add(CLI::App* app) {
    app->add_option("--expr", paths.expr, "Expression matrix (TSV)")->required();
    app->add_option("--seg", paths.seg, "Segmented copy number matrix (TSV)")->required();
    app->add_option("--calls", paths.calls, "Called states -1/0/1/2 (TSV)");
    app->add_option("--probs-loss", paths.probs[0], "P(loss) matrix");
    app->add_option("--probs-normal", paths.probs[1], "P(normal) matrix");
    app->add_option("--probs-gain", paths.probs[2], "P(gain) matrix");
    app->add_option("--probs-amp", paths.probs[3], "P(amplification) matrix");
    app->add_option("--probs-long", paths.probs_long,
                    "Long-format probabilities: feature_id sample_id p_loss p_normal p_gain p_amp");
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw plrs::InputError("cannot write " + path);
  return out;
}

void report_ingest(const plrs::Dataset& data) {
  if (!data.dropped_missing.empty())
    std::cerr << "warning: " << data.dropped_missing.size()
              << " feature(s) dropped for missing values\n";
  if (!data.unmatched.empty())
    std::cerr << "warning: " << data.unmatched.size()
              << " expression feature(s) missing from another input file\n";
  if (!data.extra_ids.empty())
    std::cerr << "warning: " << data.extra_ids.size()
              << " feature(s) present only in copy-number files were ignored\n";
}

int run_screen(const plrs::Config& config, const InputOptions& in, const std::string& out) {
  const auto data = plrs::ingest(in.paths);
  report_ingest(data);
  const auto result = plrs::screen(data, config);
  {
    auto rows = open_out(out + ".rows.tsv");
    plrs::write_rows(rows, result.rows);
    auto rejects = open_out(out + ".rejects.tsv");
    plrs::write_rejects(rejects, result.rejects);
  }
  const auto audit = plrs::summarize_rows_file(out + ".rows.tsv", result.summary.rejects,
                                               config.fdr_threshold);
  const bool consistent = audit == result.summary;
  {
    auto summary = open_out(out + ".summary.tsv");
    plrs::write_summary(summary, result.summary, consistent);
  }
  std::cout << plrs::render_summary(result.summary);
  if (!result.rejects.empty())
    std::cerr << "warning: " << result.rejects.size() << " gene(s) quarantined in " << out
              << ".rejects.tsv\n";
  if (!consistent) std::cerr << "warning: summary does not match the rows file\n";
  if (result.all_failed_in_solver) {
    std::cerr << "error: the solver failed on every gene\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_fit(const plrs::Config& config, const InputOptions& in, const std::string& id) {
  const auto data = plrs::ingest(in.paths);
  const auto index = data.index_of(id);
  const auto& gene = data.genes[index];
  const auto a = plrs::analyze_gene(gene, config, plrs::gene_seed(config, index));
  std::cout << "gene\t" << gene.id << "\nn\t" << gene.size() << "\nknots";
  for (double k : a.model_knots.knots) std::cout << '\t' << plrs::format_number(k);
  std::cout << "\nstates";
  for (int s : a.model_knots.state_labels()) std::cout << '\t' << plrs::state_name(s);
  std::cout << "\n\nmodel\tclass\tk\tloglik\tosaic\taic\tbic\n";
  for (const auto& s : a.selection.scores)
    std::cout << s.spec.mask_string() << '\t' << plrs::to_string(s.spec.model_class()) << '\t'
              << s.spec.k() << '\t' << plrs::format_number(s.fit.loglik) << '\t'
              << plrs::format_number(s.osaic) << '\t' << plrs::format_number(s.aic) << '\t'
              << plrs::format_number(s.bic) << '\n';
  const auto& best = a.selection.best(config.criterion);
  const plrs::Vector theta = plrs::expand_coefficients(best.spec, best.fit.theta);
  std::cout << "\nselected (" << plrs::to_string(config.criterion) << ")\t"
            << best.spec.mask_string() << '\t' << plrs::to_string(best.spec.model_class())
            << "\ncoefficients";
  for (Eigen::Index i = 0; i < theta.size(); ++i) std::cout << '\t' << plrs::format_number(theta(i));
  std::cout << '\n';
  if (a.test)
    std::cout << "ebar\t" << plrs::format_number(a.test->ebar) << "\npvalue\t"
              << plrs::format_number(a.test->pvalue) << '\n';
  else
    std::cout << "test\tnot run: " << a.test_note << '\n';
  std::cout << "lm_pvalue\t" << plrs::format_number(a.lm.pvalue) << '\n';
  return kExitOk;
}

int run_bands(const plrs::Config& config, const InputOptions& in, const std::string& id,
              const std::string& out) {
  const auto data = plrs::ingest(in.paths);
  const auto index = data.index_of(id);
  const auto& gene = data.genes[index];
  const auto b = plrs::gene_bands(gene, config, plrs::gene_seed(config, index));
  auto tsv = open_out(out + ".tsv");
  plrs::write_bands_tsv(tsv, b);
  auto svg = open_out(out + ".svg");
  plrs::write_bands_svg(svg, gene, b);
  return kExitOk;
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
  } else {
    auto out = open_out(path);
    write(out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained piecewise linear regression splines for copy number versus expression"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flag_values;
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--set", sets, "Override a configuration key (key=value); repeatable");
  for (const auto& key : plrs::config_keys()) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    app.add_option(flag, flag_values[key], "Override " + key);
  }

  InputOptions in;
  std::string out, gene;
  auto* screen = app.add_subcommand("screen", "Genome-wide screen: knots, selection, tests, FDR");
  in.add(screen);
  screen->add_option("--out", out, "Output prefix")->required();

  InputOptions fin;
  auto* fit = app.add_subcommand("fit", "Fit one gene and print coefficients and criteria");
  fin.add(fit);
  fit->add_option("--gene", gene, "Feature ID")->required();

  InputOptions bin;
  auto* bands = app.add_subcommand("bands", "Uniform confidence band for one gene (TSV + SVG)");
  bin.add(bands);
  bands->add_option("--gene", gene, "Feature ID")->required();
  bands->add_option("--out", out, "Output prefix")->required();

  auto* simulate = app.add_subcommand("simulate", "Simulation studies and synthetic corpora");
  simulate->require_subcommand(1);
  std::string sim_out;
  int reps = 0;
  bool full_scale = false;
  auto* point = simulate->add_subcommand("point", "Slope bias and variance, linear versus piecewise");
  bool unconstrained = false;
  point->add_option("--reps", reps, "Replicates per cell (default 1000)");
  bool continuous = false;
  point->add_flag("--unconstrained", unconstrained, "Ordinary least squares fits");
  point->add_flag("--continuous", continuous, "Piecewise fit without the jump term");
  point->add_option("--out", sim_out, "Output TSV (default stdout)");
  auto* coverage = simulate->add_subcommand("coverage", "Simultaneous coverage of the uniform band");
  coverage->add_option("--reps", reps, "Replicates per cell (default 2000)");
  coverage->add_flag("--full-scale", full_scale, "10000 replicates per cell");
  coverage->add_option("--out", sim_out, "Output TSV (default stdout)");
  auto* shapes = simulate->add_subcommand("shapes", "Cone test and LM test rejection rates by shape");
  std::vector<std::string> shape_names;
  std::vector<double> effects;
  shapes->add_option("--reps", reps, "Replicates per cell (default 500)");
  shapes->add_option("--shape", shape_names, "null, linear, level, partial (repeatable)");
  shapes->add_option("--effect", effects, "Effect sizes (repeatable)");
  shapes->add_option("--out", sim_out, "Output TSV (default stdout)");
  auto* corpus = simulate->add_subcommand("corpus", "Synthetic screening corpus with known classes");
  plrs::CorpusOptions copt;
  corpus->add_option("--genes", copt.genes, "Number of genes")->capture_default_str();
  corpus->add_option("--samples", copt.samples, "Number of samples")->capture_default_str();
  corpus->add_option("--sigma", copt.sigma, "Noise standard deviation")->capture_default_str();
  corpus->add_option("--out", sim_out, "Output prefix for expr/seg/calls/probs/truth TSVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    std::map<std::string, std::string> overrides;
    for (const auto& [k, v] : flag_values)
      if (!v.empty()) overrides[k] = v;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw plrs::InputError("--set expects key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    const auto config = plrs::load_config(config_file, overrides);

    if (*screen) return run_screen(config, in, out);
    if (*fit) return run_fit(config, fin, gene);
    if (*bands) return run_bands(config, bin, gene, out);
    if (*point) {
      plrs::PointEstimationOptions o;
      o.seed = config.seed;
      o.threads = config.threads;
      o.constrained = !unconstrained;
      o.continuous = continuous;
      if (reps > 0) o.reps = reps;
      const auto cells = plrs::sim_point_estimation(o);
      emit(sim_out, [&](std::ostream& os) { plrs::write_point_table(os, cells); });
    } else if (*coverage) {
      plrs::CoverageOptions o;
      o.seed = config.seed;
      o.threads = config.threads;
      o.mc_draws = config.mc_draws;
      if (full_scale) o.reps = 10'000;
      if (reps > 0) o.reps = reps;
      const auto cells = plrs::sim_coverage(o);
      emit(sim_out, [&](std::ostream& os) { plrs::write_coverage_table(os, cells); });
    } else if (*shapes) {
      plrs::ShapeOptions o;
      o.seed = config.seed;
      o.threads = config.threads;
      o.mc_draws = config.mc_draws;
      o.min_obs_per_state = config.min_obs_per_state_test;
      if (reps > 0) o.reps = reps;
      if (!shape_names.empty()) {
        o.shapes.clear();
        for (const auto& s : shape_names) o.shapes.push_back(plrs::parse_shape(s));
      }
      if (!effects.empty()) o.effects = effects;
      const auto cells = plrs::sim_test_shapes(o);
      emit(sim_out, [&](std::ostream& os) { plrs::write_shape_table(os, cells); });
    } else if (*corpus) {
      copt.seed = config.seed;
      const auto c = plrs::sim_corpus(copt);
      plrs::write_dataset(c.data, sim_out);
      auto truth = open_out(sim_out + "truth.tsv");
      plrs::write_corpus_truth(truth, c);
    }
    return kExitOk;
  } catch (const plrs::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const plrs::SolverError& e) {
    std::cerr << "error: solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
