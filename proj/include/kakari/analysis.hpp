#pragma once

// Sentence accuracy and residual response time.
//
// Each finished trial becomes one observation. Response time is regressed on
// nine nuisance covariates (morae, characters, phrases, presentation order,
// the four action counts, and left/right alternations) using the correctly
// parsed trials only; the internally studentized residuals are then averaged
// per sentence category.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kakari/regression.hpp"
#include "kakari/session.hpp"

namespace kakari {

struct ObservationRow {
  std::string subject_id;
  std::string sentence_id;
  SentenceType category = SentenceType::Filler;
  bool correct = false;
  double y = 0;  // seconds

  int morae = 0;
  int chars = 0;
  int phrases = 0;
  int order = 0;
  int n_default_shift = 0;
  int n_default_reduce = 0;
  int n_shift = 0;
  int n_reduce = 0;
  int alternations = 0;
};

inline constexpr std::array<const char*, 10> kDesignColumns = {
    "intercept", "morae",  "chars",   "phrases", "order", "default_shift", "default_reduce",
    "shift",     "reduce", "alternations"};

enum class ResponseMeasure {
  JudgedResponse,  // sum of judged-action response times
  WallClock,       // trial start to JUMP minus animation windows
};

struct ExtractOptions {
  ResponseMeasure measure = ResponseMeasure::JudgedResponse;
  bool include_practice = false;
};

// Trials missing sentence metadata are filled from `corpus` when given;
// otherwise ExtractionError names the sentence.
std::vector<ObservationRow> extract_observations(const std::vector<SessionLog>& logs,
                                                 const CorpusFile* corpus = nullptr,
                                                 const ExtractOptions& options = {});

Eigen::MatrixXd design_matrix(const std::vector<ObservationRow>& rows);

enum class Grouping { Pooled, PerSubject };
std::string_view to_string(Grouping g);

struct RegressionFit {
  std::string group;                // "pooled" or the subject id
  std::vector<size_t> row_indices;  // rows (of the input) that entered the fit
  LeastSquaresFit fit;
};

// Fits the correctly parsed rows, pooled or one fit per subject.
std::vector<RegressionFit> fit_ols(const std::vector<ObservationRow>& rows, Grouping grouping,
                                   const FitOptions& options = {});

struct CategoryStats {
  double accuracy_mean = 0;                // percent over all rows
  std::optional<double> accuracy_stdev;    // across per-subject accuracies
  std::optional<double> srrt_mean;         // over correct rows' residuals
  std::optional<double> srrt_stdev;
  int rows = 0;
  int correct_rows = 0;
  int subjects = 0;
};

struct CategoryTable {
  Grouping grouping = Grouping::Pooled;
  // Indexed Filler, CTRL, EB, LB; nullopt when the category has no rows.
  std::array<std::optional<CategoryStats>, 4> categories;

  const std::optional<CategoryStats>& operator[](SentenceType t) const {
    return categories[static_cast<size_t>(t)];
  }
};

// `residuals` holds one value per correct row, in row order. NaN marks a row
// whose residual is undefined (leverage 1); it is left out of the s.r.r.t.
// statistics but still counts towards accuracy.
CategoryTable category_report(const std::vector<ObservationRow>& rows, const std::vector<double>& residuals,
                              Grouping grouping = Grouping::Pooled);

std::string render_table_text(const CategoryTable& table);
std::string render_table_tsv(const CategoryTable& table);

struct AnalysisResult {
  std::vector<ObservationRow> rows;
  std::vector<RegressionFit> fits;
  std::vector<double> residuals;  // aligned with correct rows; NaN where undefined
  CategoryTable table;
  std::vector<std::string> warnings;
};

AnalysisResult analyze(std::vector<ObservationRow> rows, Grouping grouping, const FitOptions& options = {});

}  // namespace kakari
