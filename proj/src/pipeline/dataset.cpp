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

#include "plrs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace plrs {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

double parse_cell(const std::string& cell, const std::string& where) {
  if (is_missing(cell)) return kMissing;
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InputError(where + ": cannot parse '" + cell + "' as a number");
  return v;
}

std::string location(const std::string& path, std::size_t line, std::size_t col) {
  return path + ":" + std::to_string(line) + ":" + std::to_string(col);
}

/// Feature-by-sample numeric table.
struct Table {
  std::string path;
  std::vector<std::string> samples;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> index;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  Table t;
  t.path = path;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file, expected a header row");
  auto header = split_tabs(line);
  if (header.size() < 2) throw InputError(path + ": header needs an ID column and samples");
  t.samples.assign(header.begin() + 1, header.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size())
      throw InputError(location(path, lineno, cells.size()) + ": expected " +
                       std::to_string(header.size()) + " columns, found " +
                       std::to_string(cells.size()));
    std::vector<double> row(cells.size() - 1);
    for (std::size_t j = 1; j < cells.size(); ++j)
      row[j - 1] = parse_cell(cells[j], location(path, lineno, j + 1));
    if (!t.index.emplace(cells[0], t.ids.size()).second)
      throw InputError(location(path, lineno, 1) + ": duplicate feature ID '" + cells[0] + "'");
    t.ids.push_back(cells[0]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void require_same_samples(const Table& ref, const Table& other) {
  if (ref.samples == other.samples) return;
  std::string detail;
  if (ref.samples.size() != other.samples.size()) {
    detail = std::to_string(ref.samples.size()) + " versus " +
             std::to_string(other.samples.size()) + " samples";
  } else {
    for (std::size_t j = 0; j < ref.samples.size(); ++j)
      if (ref.samples[j] != other.samples[j]) {
        detail = "column " + std::to_string(j + 2) + " is '" + ref.samples[j] + "' versus '" +
                 other.samples[j] + "'";
        break;
      }
  }
  throw InputError("sample columns differ between " + ref.path + " and " + other.path + " (" +
                   detail + ")");
}

using ProbMap = std::unordered_map<std::string, Matrix>;

ProbMap read_long_probs(const std::string& path, const std::vector<std::string>& samples) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::unordered_map<std::string, Eigen::Index> sample_col;
  for (std::size_t j = 0; j < samples.size(); ++j)
    sample_col[samples[j]] = static_cast<Eigen::Index>(j);
  const auto n = static_cast<Eigen::Index>(samples.size());
  ProbMap out;
  std::unordered_map<std::string, std::vector<bool>> seen;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file, expected a header row");
  if (split_tabs(line).size() != 6)
    throw InputError(path + ": expected columns feature_id, sample_id, p_loss, p_normal, p_gain, p_amp");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_tabs(line);
    if (cells.size() != 6)
      throw InputError(location(path, lineno, cells.size()) + ": expected 6 columns");
    const auto col = sample_col.find(cells[1]);
    if (col == sample_col.end())
      throw InputError(location(path, lineno, 2) + ": unknown sample '" + cells[1] + "'");
    auto [it, fresh] = out.try_emplace(cells[0], Matrix::Constant(n, 4, kMissing));
    auto& mark = seen[cells[0]];
    if (fresh) mark.assign(samples.size(), false);
    if (mark[col->second])
      throw InputError(location(path, lineno, 1) + ": duplicate entry for '" + cells[0] + "', '" +
                       cells[1] + "'");
    mark[col->second] = true;
    for (int c = 0; c < 4; ++c)
      it->second(col->second, c) = parse_cell(cells[2 + c], location(path, lineno, 3 + c));
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const GeneRecord* Dataset::find(const std::string& id) const {
  for (const auto& g : genes)
    if (g.id == id) return &g;
  return nullptr;
}

std::size_t Dataset::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < genes.size(); ++i)
    if (genes[i].id == id) return i;
  throw InputError("unknown gene id '" + id + "'");
}

Dataset ingest(const IngestPaths& paths) {
  if (paths.expr.empty() || paths.seg.empty())
    throw InputError("expression and segmented copy-number files are required");
  const bool four = std::any_of(paths.probs.begin(), paths.probs.end(),
                                [](const std::string& p) { return !p.empty(); });
  if (four && std::any_of(paths.probs.begin(), paths.probs.end(),
                          [](const std::string& p) { return p.empty(); }))
    throw InputError("probability input needs all four files (loss, normal, gain, amp)");
  if (four && !paths.probs_long.empty())
    throw InputError("give either four probability files or one long-format file, not both");
  const bool has_probs = four || !paths.probs_long.empty();
  if (paths.calls.empty() && !has_probs)
    throw InputError("a calls file or call probabilities are required");

  const Table expr = read_table(paths.expr);
  const Table seg = read_table(paths.seg);
  require_same_samples(expr, seg);
  std::optional<Table> calls;
  if (!paths.calls.empty()) {
    calls = read_table(paths.calls);
    require_same_samples(expr, *calls);
  }
  std::array<std::optional<Table>, 4> prob_tables;
  ProbMap long_probs;
  if (four) {
    for (int c = 0; c < 4; ++c) {
      prob_tables[c] = read_table(paths.probs[c]);
      require_same_samples(expr, *prob_tables[c]);
    }
  } else if (!paths.probs_long.empty()) {
    long_probs = read_long_probs(paths.probs_long, expr.samples);
  }

  Dataset data;
  data.samples = expr.samples;
  data.has_probabilities = has_probs;
  const auto n = static_cast<Eigen::Index>(expr.samples.size());

  std::set<std::string> expr_ids(expr.ids.begin(), expr.ids.end());
  auto note_extra = [&](const std::vector<std::string>& ids) {
    for (const auto& id : ids)
      if (!expr_ids.count(id)) data.extra_ids.push_back(id);
  };
  note_extra(seg.ids);
  if (calls) note_extra(calls->ids);

  for (std::size_t g = 0; g < expr.ids.size(); ++g) {
    const std::string& id = expr.ids[g];
    const auto s_it = seg.index.find(id);
    const bool in_calls = !calls || calls->index.count(id);
    bool in_probs = true;
    if (four)
      for (const auto& t : prob_tables) in_probs = in_probs && t->index.count(id);
    else if (has_probs)
      in_probs = long_probs.count(id) > 0;
    if (s_it == seg.index.end() || !in_calls || !in_probs) {
      data.unmatched.push_back(id);
      continue;
    }

    GeneRecord rec;
    rec.id = id;
    rec.sample_ids = expr.samples;
    rec.y = Eigen::Map<const Vector>(expr.rows[g].data(), n);
    rec.x = Eigen::Map<const Vector>(seg.rows[s_it->second].data(), n);
    bool missing = rec.y.hasNaN() || rec.x.hasNaN();
    if (has_probs) {
      Matrix P(n, 4);
      if (four) {
        for (int c = 0; c < 4; ++c)
          P.col(c) = Eigen::Map<const Vector>(
              prob_tables[c]->rows[prob_tables[c]->index.at(id)].data(), n);
      } else {
        P = long_probs.at(id);
      }
      missing = missing || P.hasNaN();
      rec.callprobs = std::move(P);
    }
    rec.s.resize(n);
    if (calls) {
      const auto& row = calls->rows[calls->index.at(id)];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isnan(row[i])) {
          missing = true;
          continue;
        }
        if (row[i] != std::round(row[i]) || row[i] < kLoss || row[i] > kAmp)
          throw InputError(paths.calls + ": feature '" + id + "', sample '" + expr.samples[i] +
                           "': call must be -1, 0, 1 or 2");
        rec.s[i] = static_cast<int>(row[i]);
      }
    } else if (!missing) {
      // Hard calls from the most probable state.
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        rec.callprobs->row(i).maxCoeff(&best);
        rec.s[i] = static_cast<int>(best) + kLoss;
      }
    }
    if (missing) {
      data.dropped_missing.push_back(id);
      continue;
    }
    try {
      rec.validate();
    } catch (const InputError& e) {
      throw InputError("feature '" + id + "': " + e.what());
    }
    data.genes.push_back(std::move(rec));
  }
  return data;
}

void write_dataset(const Dataset& data, const std::string& prefix) {
  auto open = [&](const std::string& name) {
    std::ofstream out(prefix + name);
    if (!out) throw InputError("cannot write " + prefix + name);
    return out;
  };
  auto header = [&](std::ofstream& out) {
    out << "feature_id";
    for (const auto& s : data.samples) out << '\t' << s;
    out << '\n';
  };
  auto expr = open("expr.tsv"), seg = open("seg.tsv"), calls = open("calls.tsv");
  header(expr);
  header(seg);
  header(calls);
  for (const auto& g : data.genes) {
    expr << g.id;
    seg << g.id;
    calls << g.id;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      expr << '\t' << format_number(g.y(i));
      seg << '\t' << format_number(g.x(i));
      calls << '\t' << g.s[i];
    }
    expr << '\n';
    seg << '\n';
    calls << '\n';
  }
  if (!data.has_probabilities) return;
  auto probs = open("probs.tsv");
  probs << "feature_id\tsample_id\tp_loss\tp_normal\tp_gain\tp_amp\n";
  for (const auto& g : data.genes)
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      probs << g.id << '\t' << data.samples[i];
      for (int c = 0; c < 4; ++c) probs << '\t' << format_number((*g.callprobs)(i, c));
      probs << '\n';
    }
}

}  // namespace plrs
