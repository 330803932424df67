#include "kakari/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "kakari/error.hpp"

namespace kakari {

std::string_view to_string(Grouping g) { return g == Grouping::Pooled ? "pooled" : "per-subject"; }

std::vector<ObservationRow> extract_observations(const std::vector<SessionLog>& logs, const CorpusFile* corpus,
                                                 const ExtractOptions& options) {
  std::vector<ObservationRow> rows;
  for (const auto& log : logs) {
    if (log.practice && !options.include_practice) continue;
    for (const auto& t : log.trials) {
      ObservationRow r;
      r.subject_id = log.subject_id;
      r.sentence_id = t.sentence_id;
      r.category = t.category;
      r.correct = t.verdict == Verdict::Ok;
      r.morae = t.morae;
      r.chars = t.chars;
      r.phrases = t.phrases;
      if (r.phrases == 0 || r.morae == 0 || r.chars == 0) {
        const SentenceRecord* rec = corpus ? corpus->find(t.sentence_id) : nullptr;
        if (!rec) throw ExtractionError("no sentence metadata for '" + t.sentence_id + "'");
        r.phrases = rec->sentence.size();
        r.morae = rec->sentence.total_morae();
        r.chars = rec->sentence.total_chars();
      }
      r.order = t.presentation_order;
      const ActionCounts c = t.counts();
      r.n_default_shift = c.default_shift;
      r.n_default_reduce = c.default_reduce;
      r.n_shift = c.shift;
      r.n_reduce = c.reduce;
      r.alternations = t.direction_alternations;
      if (options.measure == ResponseMeasure::JudgedResponse) {
        r.y = t.judged_response_ms() / 1000.0;
      } else {
        const double animations = static_cast<double>(t.actions.size()) * log.config.animation_ms;
        r.y = (t.ended_at - t.started_at - animations) / 1000.0;
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

Eigen::MatrixXd design_matrix(const std::vector<ObservationRow>& rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kDesignColumns.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    x.row(static_cast<Eigen::Index>(i)) << 1.0, r.morae, r.chars, r.phrases, r.order, r.n_default_shift,
        r.n_default_reduce, r.n_shift, r.n_reduce, r.alternations;
  }
  return x;
}

namespace {

RegressionFit fit_subset(const std::vector<ObservationRow>& rows, std::vector<size_t> idx, std::string group,
                         const FitOptions& options) {
  std::vector<ObservationRow> subset;
  subset.reserve(idx.size());
  for (size_t i : idx) subset.push_back(rows[i]);
  Eigen::VectorXd y(static_cast<Eigen::Index>(subset.size()));
  for (size_t i = 0; i < subset.size(); ++i) y(static_cast<Eigen::Index>(i)) = subset[i].y;
  const std::vector<std::string> names(kDesignColumns.begin(), kDesignColumns.end());
  RegressionFit f{std::move(group), std::move(idx), {}};
  try {
    f.fit = fit_least_squares(design_matrix(subset), y, names, options);
  } catch (const RankDeficientError& e) {
    throw RankDeficientError("fit for " + f.group + ": " + e.what());
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError("fit for " + f.group + ": " + e.what());
  }
  return f;
}

}  // namespace

std::vector<RegressionFit> fit_ols(const std::vector<ObservationRow>& rows, Grouping grouping,
                                   const FitOptions& options) {
  std::vector<RegressionFit> fits;
  if (grouping == Grouping::Pooled) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < rows.size(); ++i)
      if (rows[i].correct) idx.push_back(i);
    fits.push_back(fit_subset(rows, std::move(idx), "pooled", options));
    return fits;
  }
  std::map<std::string, std::vector<size_t>> by_subject;
  for (size_t i = 0; i < rows.size(); ++i)
    if (rows[i].correct) by_subject[rows[i].subject_id].push_back(i);
  for (auto& [subject, idx] : by_subject) fits.push_back(fit_subset(rows, std::move(idx), subject, options));
  return fits;
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> sample_stdev(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

CategoryTable category_report(const std::vector<ObservationRow>& rows, const std::vector<double>& residuals,
                              Grouping grouping) {
  const auto correct = static_cast<size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ObservationRow& r) { return r.correct; }));
  if (residuals.size() != correct) {
    throw InvalidStateError("expected " + std::to_string(correct) + " residuals, got " +
                            std::to_string(residuals.size()));
  }

  CategoryTable table;
  table.grouping = grouping;
  for (auto type : kAllSentenceTypes) {
    int n = 0, n_correct = 0;
    std::map<std::string, std::pair<int, int>> per_subject;  // correct, total
    std::vector<double> res;
    size_t k = 0;
    for (const auto& r : rows) {
      const bool in = r.category == type;
      if (in) {
        ++n;
        auto& [c, total] = per_subject[r.subject_id];
        ++total;
        if (r.correct) {
          ++c;
          ++n_correct;
        }
      }
      if (r.correct) {
        if (in && !std::isnan(residuals[k])) res.push_back(residuals[k]);
        ++k;
      }
    }
    if (n == 0) continue;
    CategoryStats s;
    s.rows = n;
    s.correct_rows = n_correct;
    s.subjects = static_cast<int>(per_subject.size());
    s.accuracy_mean = 100.0 * n_correct / n;
    std::vector<double> subject_acc;
    for (const auto& [id, ct] : per_subject) subject_acc.push_back(100.0 * ct.first / ct.second);
    s.accuracy_stdev = sample_stdev(subject_acc);
    if (!res.empty()) {
      s.srrt_mean = mean(res);
      s.srrt_stdev = sample_stdev(res);
    }
    table.categories[static_cast<size_t>(type)] = s;
  }
  return table;
}

namespace {

std::string fmt(std::optional<double> v, const char* f) {
  if (!v || !std::isfinite(*v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, *v);
  std::string s = buf;
  if (s == "-0" || s == "-0.0" || s == "-0.00") s.erase(0, 1);
  return s;
}

struct TableCells {
  std::array<std::array<std::string, 4>, 4> text;  // [row][category]
};

const std::array<const char*, 4> kHeaders = {"Filler", "CTRL", "EB", "LB"};
const std::array<std::pair<const char*, const char*>, 4> kRowLabels = {
    std::pair{"acc. (%)", "ave."}, {"", "stdev."}, {"s.r.r.t.", "ave."}, {"", "stdev."}};

TableCells cells(const CategoryTable& t, bool machine) {
  TableCells c;
  for (size_t k = 0; k < 4; ++k) {
    const auto& s = t.categories[k];
    const auto get = [&](int row) -> std::optional<double> {
      if (!s) return std::nullopt;
      switch (row) {
        case 0: return s->accuracy_mean;
        case 1: return s->accuracy_stdev;
        case 2: return s->srrt_mean;
        default: return s->srrt_stdev;
      }
    };
    static const std::array<const char*, 4> human = {"%.0f", "%.1f", "%.2f", "%.2f"};
    for (int row = 0; row < 4; ++row) {
      std::string v = fmt(get(row), machine ? "%.6f" : human[static_cast<size_t>(row)]);
      if (machine && v == "n/a") v = "NA";
      c.text[static_cast<size_t>(row)][k] = v;
    }
  }
  return c;
}

}  // namespace

std::string render_table_text(const CategoryTable& table) {
  const TableCells c = cells(table, false);
  std::ostringstream out;
  char line[256];
  out << "Sentence accuracy and sentence response time (" << to_string(table.grouping) << " regression)\n";
  std::snprintf(line, sizeof line, "%-9s %-7s|%8s%8s%8s%8s\n", "", "", kHeaders[0], kHeaders[1], kHeaders[2],
                kHeaders[3]);
  out << line;
  for (size_t row = 0; row < 4; ++row) {
    if (row == 0 || row == 2) out << std::string(50, '-') << '\n';
    std::snprintf(line, sizeof line, "%-9s %-7s|%8s%8s%8s%8s\n", kRowLabels[row].first, kRowLabels[row].second,
                  c.text[row][0].c_str(), c.text[row][1].c_str(), c.text[row][2].c_str(), c.text[row][3].c_str());
    out << line;
  }
  out << std::string(50, '-') << '\n';
  return out.str();
}

std::string render_table_tsv(const CategoryTable& table) {
  const TableCells c = cells(table, true);
  std::ostringstream out;
  out << "metric\tstat";
  for (const char* h : kHeaders) out << '\t' << h;
  out << '\n';
  for (size_t row = 0; row < 4; ++row) {
    const char* metric = row < 2 ? "acc. (%)" : "s.r.r.t.";
    out << metric << '\t' << kRowLabels[row].second;
    for (size_t k = 0; k < 4; ++k) out << '\t' << c.text[row][k];
    out << '\n';
  }
  return out.str();
}

AnalysisResult analyze(std::vector<ObservationRow> rows, Grouping grouping, const FitOptions& options) {
  AnalysisResult result;
  result.rows = std::move(rows);
  result.fits = fit_ols(result.rows, grouping, options);

  // residual per input row, then compacted to correct-row order
  std::vector<std::optional<double>> by_row(result.rows.size());
  for (const auto& f : result.fits) {
    const Eigen::VectorXd r = studentized_residuals(f.fit, UndefinedRows::MarkNaN);
    for (size_t k = 0; k < f.row_indices.size(); ++k) {
      const double v = r(static_cast<Eigen::Index>(k));
      by_row[f.row_indices[k]] = v;
      if (std::isnan(v)) {
        const auto& row = result.rows[f.row_indices[k]];
        result.warnings.push_back(f.group + ": " + row.subject_id + "/" + row.sentence_id +
                                  " has leverage 1; residual undefined, excluded");
      }
    }
    for (const auto& w : f.fit.warnings) result.warnings.push_back(f.group + ": " + w);
  }
  for (size_t i = 0; i < result.rows.size(); ++i)
    if (result.rows[i].correct) result.residuals.push_back(*by_row[i]);
  result.table = category_report(result.rows, result.residuals, grouping);
  return result;
}

}  // namespace kakari
