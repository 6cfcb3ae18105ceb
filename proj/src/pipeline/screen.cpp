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

#include "plrs/screen.hpp"

#include "plrs/knots.hpp"
#include "plrs/parallel.hpp"
#include "plrs/rng.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <variant>

namespace plrs {
namespace {

constexpr std::uint64_t kTestStream = 1000;
constexpr std::array<Criterion, 3> kCriteria{Criterion::OSAIC, Criterion::AIC, Criterion::BIC};
constexpr std::array<ModelClass, 4> kClasses{ModelClass::Intercept, ModelClass::SimpleLinear,
                                             ModelClass::PiecewiseLevel,
                                             ModelClass::PiecewiseLinear};
const std::array<const char*, 8> kCoefficientNames{"theta_0",   "theta_1",   "theta_1_0",
                                                   "theta_1_1", "theta_2_0", "theta_2_1",
                                                   "theta_3_0", "theta_3_1"};

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  if (items.empty()) return "NA";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

ScreenRow make_row(const GeneRecord& gene, const GeneAnalysis& a, const Config& config) {
  ScreenRow row;
  row.gene_id = gene.id;
  row.n = gene.size();
  row.states = a.model_knots.state_labels();
  row.knots = a.model_knots.knots;
  row.merged = a.merged_model;
  for (std::size_t c = 0; c < kCriteria.size(); ++c)
    row.classes[c] = a.selection.best(kCriteria[c]).spec.model_class();
  const auto& best = a.selection.best(config.criterion);
  row.model = best.spec.mask_string();
  row.osaic = best.osaic;
  row.aic = best.aic;
  row.bic = best.bic;
  row.coefficients = Vector::Constant(kMaxCoefficients, std::numeric_limits<double>::quiet_NaN());
  const Vector full = expand_coefficients(best.spec, best.fit.theta);
  for (int j = 0; j < full.size(); ++j)
    if (best.spec.included[j]) row.coefficients(j) = full(j);
  if (a.test) {
    row.ebar = a.test->ebar;
    row.pvalue = a.test->pvalue;
  } else {
    row.flags.push_back("test_skipped");
  }
  if (!std::isnan(a.lm.pvalue)) {
    row.lm_slope = a.lm.slope;
    row.lm_pvalue = a.lm.pvalue;
  }
  if (a.merged_model) row.flags.push_back("merged_model");
  if (a.merged_test) row.flags.push_back("merged_test");
  if (!a.selection.skipped.empty())
    row.flags.push_back("skipped_submodels=" + std::to_string(a.selection.skipped.size()));
  return row;
}

void assign_qvalues(std::vector<ScreenRow>& rows, double ScreenRow::*p, double ScreenRow::*q) {
  std::vector<double> ps;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!std::isnan(rows[i].*p)) {
      ps.push_back(rows[i].*p);
      where.push_back(i);
    }
  const auto qs = bh_qvalues(ps);
  for (std::size_t j = 0; j < where.size(); ++j) rows[where[j]].*q = qs[j];
}

std::size_t class_index(ModelClass c) { return static_cast<std::size_t>(c); }

std::optional<ModelClass> parse_class(const std::string& s) {
  for (auto c : kClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

}  // namespace

KnotSet estimate_knots(const GeneRecord& gene, int method) {
  const auto xs = as_span(gene.x);
  if (method == 1) return knots_from_calls(xs, gene.s);
  if (method == 2) {
    if (!gene.callprobs) throw InputError("knot method 2 needs call probabilities");
    const auto states = gene.states_present();
    return knots_from_probabilities(xs, *gene.callprobs, states);
  }
  throw InputError("knot method must be 1 or 2");
}

std::uint64_t gene_seed(const Config& config, std::size_t gene_index) {
  return stream_seed(config.seed, gene_index);
}

GeneAnalysis analyze_gene(const GeneRecord& gene, const Config& config, std::uint64_t seed) {
  gene.validate();
  const auto xs = as_span(gene.x);
  GeneAnalysis a;
  a.knots = estimate_knots(gene, config.knot_method);
  a.model_knots = merge_sparse_segments(a.knots, xs, config.min_obs_per_state_model, &a.merged_model);
  a.selection = select_model(xs, gene.y, a.model_knots, {config.mc_draws, seed});
  a.test_knots = merge_sparse_segments(a.knots, xs, config.min_obs_per_state_test, &a.merged_test);
  try {
    const auto D = build_design(xs, SplineSpec::full(a.test_knots));
    a.test = plrs_test(D, gene.y, config.mc_draws, stream_seed(seed, kTestStream));
  } catch (const InputError& e) {
    a.test_note = e.what();
  }
  try {
    a.lm = lm_test(xs, gene.y);
  } catch (const InputError&) {
    a.lm.pvalue = std::numeric_limits<double>::quiet_NaN();
  }
  return a;
}

ScreenResult screen(const Dataset& data, const Config& config) {
  using Outcome = std::variant<ScreenRow, Reject>;
  const std::size_t m = data.genes.size();
  std::vector<Outcome> outcomes(m);
  parallel_for(m, config.threads, [&](std::size_t i) {
    const auto& gene = data.genes[i];
    try {
      const auto a = analyze_gene(gene, config, gene_seed(config, i));
      outcomes[i] = make_row(gene, a, config);
    } catch (const InputError& e) {
      outcomes[i] = Reject{gene.id, "input", e.what()};
    } catch (const SolverError& e) {
      outcomes[i] = Reject{gene.id, "solver", e.what()};
    }
  });

  ScreenResult out;
  for (const auto& id : data.unmatched) out.rejects.push_back({id, "ingest", "feature missing from an input file"});
  for (const auto& id : data.dropped_missing) out.rejects.push_back({id, "ingest", "missing value"});
  long solver_failures = 0;
  for (auto& o : outcomes) {
    if (auto* row = std::get_if<ScreenRow>(&o)) {
      out.rows.push_back(std::move(*row));
    } else {
      auto& r = std::get<Reject>(o);
      solver_failures += r.stage == "solver";
      out.rejects.push_back(std::move(r));
    }
  }
  assign_qvalues(out.rows, &ScreenRow::pvalue, &ScreenRow::qvalue);
  assign_qvalues(out.rows, &ScreenRow::lm_pvalue, &ScreenRow::lm_qvalue);
  out.input_genes = static_cast<long>(m + data.unmatched.size() + data.dropped_missing.size());
  out.summary = summarize(out.rows, static_cast<long>(out.rejects.size()), config.fdr_threshold);
  out.all_failed_in_solver = m > 0 && solver_failures == static_cast<long>(m);
  return out;
}

ScreenSummary summarize(const std::vector<ScreenRow>& rows, long rejects, double fdr_threshold) {
  ScreenSummary s;
  s.fdr_threshold = fdr_threshold;
  s.rows = static_cast<long>(rows.size());
  s.rejects = rejects;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 3; ++c) ++s.selected[c][class_index(r.classes[c])];
    if (!std::isnan(r.pvalue)) {
      ++s.tested;
      s.discoveries_full += r.qvalue < fdr_threshold;
    }
    if (!std::isnan(r.lm_pvalue)) {
      ++s.lm_tested;
      s.discoveries_linear += r.lm_qvalue < fdr_threshold;
    }
  }
  return s;
}

void write_rows(std::ostream& out, const std::vector<ScreenRow>& rows) {
  out << "gene_id\tn\tstates\tknots\tmerged\tclass_osaic\tclass_aic\tclass_bic\tmodel\tosaic\taic\tbic";
  for (const char* name : kCoefficientNames) out << '\t' << name;
  out << "\tebar\tpvalue\tqvalue\tlm_slope\tlm_pvalue\tlm_qvalue\tflags\n";
  for (const auto& r : rows) {
    out << r.gene_id << '\t' << r.n << '\t'
        << join(r.states, [](int s) { return std::string(state_name(s)); }) << '\t'
        << join(r.knots, [](double k) { return format_number(k); }) << '\t' << (r.merged ? 1 : 0);
    for (auto c : r.classes) out << '\t' << to_string(c);
    out << '\t' << r.model << '\t' << format_number(r.osaic) << '\t' << format_number(r.aic)
        << '\t' << format_number(r.bic);
    for (Eigen::Index j = 0; j < r.coefficients.size(); ++j)
      out << '\t' << format_number(r.coefficients(j));
    out << '\t' << format_number(r.ebar) << '\t' << format_number(r.pvalue) << '\t'
        << format_number(r.qvalue) << '\t' << format_number(r.lm_slope) << '\t'
        << format_number(r.lm_pvalue) << '\t' << format_number(r.lm_qvalue) << '\t'
        << join(r.flags, [](const std::string& f) { return f; }) << '\n';
  }
}

void write_rejects(std::ostream& out, const std::vector<Reject>& rejects) {
  out << "gene_id\tstage\treason\n";
  for (const auto& r : rejects) {
    std::string reason = r.reason;
    for (auto& ch : reason)
      if (ch == '\t' || ch == '\n') ch = ' ';
    out << r.gene_id << '\t' << r.stage << '\t' << reason << '\n';
  }
}

void write_summary(std::ostream& out, const ScreenSummary& s, bool audit_consistent) {
  out << "table\trow\tcolumn\tvalue\n";
  for (auto c : kClasses)
    for (std::size_t k = 0; k < 3; ++k)
      out << "selection\t" << to_string(c) << '\t' << to_string(kCriteria[k]) << '\t'
          << s.selected[k][class_index(c)] << '\n';
  out << "discoveries\tintercept-vs-linear\ttested\t" << s.lm_tested << '\n'
      << "discoveries\tintercept-vs-linear\tq_below\t" << s.discoveries_linear << '\n'
      << "discoveries\tintercept-vs-full\ttested\t" << s.tested << '\n'
      << "discoveries\tintercept-vs-full\tq_below\t" << s.discoveries_full << '\n'
      << "totals\trows\tcount\t" << s.rows << '\n'
      << "totals\trejects\tcount\t" << s.rejects << '\n'
      << "totals\tfdr_threshold\tvalue\t" << format_number(s.fdr_threshold) << '\n'
      << "audit\trows_file\tconsistent\t" << (audit_consistent ? 1 : 0) << '\n';
}

ScreenSummary summarize_rows_file(const std::string& path, long rejects, double fdr_threshold) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty rows file");
  std::map<std::string, std::size_t> col;
  {
    std::istringstream hs(line);
    std::string name;
    for (std::size_t i = 0; std::getline(hs, name, '\t'); ++i) col[name] = i;
  }
  for (const char* need : {"class_osaic", "class_aic", "class_bic", "pvalue", "qvalue",
                           "lm_pvalue", "lm_qvalue"})
    if (!col.count(need)) throw InputError(path + ": missing column " + need);
  std::vector<ScreenRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, '\t');) cells.push_back(cell);
    if (cells.size() < col.size()) throw InputError(path + ": short row");
    ScreenRow r;
    const char* names[3] = {"class_osaic", "class_aic", "class_bic"};
    for (int c = 0; c < 3; ++c) {
      const auto mc = parse_class(cells[col[names[c]]]);
      if (!mc) throw InputError(path + ": unknown model class '" + cells[col[names[c]]] + "'");
      r.classes[c] = *mc;
    }
    auto num = [&](const char* name) {
      const auto& cell = cells[col[name]];
      return cell == "NA" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell);
    };
    r.pvalue = num("pvalue");
    r.qvalue = num("qvalue");
    r.lm_pvalue = num("lm_pvalue");
    r.lm_qvalue = num("lm_qvalue");
    rows.push_back(std::move(r));
  }
  return summarize(rows, rejects, fdr_threshold);
}

std::string render_summary(const ScreenSummary& s) {
  std::ostringstream os;
  os << "Number of times a model type is selected\n";
  os << std::left << std::setw(18) << "type" << std::right << std::setw(10) << "OSAIC"
     << std::setw(10) << "AIC" << std::setw(10) << "BIC" << '\n';
  for (auto c : kClasses) {
    os << std::left << std::setw(18) << to_string(c) << std::right;
    for (std::size_t k = 0; k < 3; ++k) os << std::setw(10) << s.selected[k][class_index(c)];
    os << '\n';
  }
  os << "\nAssociations with estimated FDR below " << format_number(s.fdr_threshold) << '\n';
  os << std::left << std::setw(12) << "H0" << std::setw(10) << "Ha" << std::right
     << std::setw(10) << "tested" << std::setw(10) << "q_below" << '\n';
  os << std::left << std::setw(12) << "intercept" << std::setw(10) << "linear" << std::right
     << std::setw(10) << s.lm_tested << std::setw(10) << s.discoveries_linear << '\n';
  os << std::left << std::setw(12) << "intercept" << std::setw(10) << "full" << std::right
     << std::setw(10) << s.tested << std::setw(10) << s.discoveries_full << '\n';
  return os.str();
}

}  // namespace plrs
