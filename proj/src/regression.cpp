#include "kakari/regression.hpp"

#include <cmath>
#include <limits>

#include "kakari/error.hpp"

namespace kakari {

namespace {

// Indices of the columns kept by a left-to-right scan: each column is
// projected onto the span of the columns kept so far.
std::vector<int> independent_columns(const Eigen::MatrixXd& x, double tol) {
  std::vector<int> kept;
  for (int j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd col = x.col(j);
    const double norm = col.norm();
    if (norm == 0.0) continue;
    double resid = norm;
    if (!kept.empty()) {
      Eigen::MatrixXd basis(x.rows(), static_cast<Eigen::Index>(kept.size()));
      for (size_t k = 0; k < kept.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = x.col(kept[k]);
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
      const Eigen::VectorXd coef = qr.solve(col);
      resid = (col - basis * coef).norm();
    }
    if (resid > tol * norm) kept.push_back(j);
  }
  return kept;
}

}  // namespace

LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                  const std::vector<std::string>& names, const FitOptions& options) {
  if (design.rows() != y.size()) throw InvalidStateError("design and response lengths differ");
  if (static_cast<Eigen::Index>(names.size()) != design.cols()) throw InvalidStateError("one name per column required");

  LeastSquaresFit fit;
  const auto kept = independent_columns(design, options.collinearity_tol);
  std::vector<bool> keep(static_cast<size_t>(design.cols()), false);
  for (int j : kept) keep[static_cast<size_t>(j)] = true;
  for (size_t j = 0; j < keep.size(); ++j) {
    if (keep[j]) {
      fit.columns.push_back(names[j]);
    } else {
      fit.dropped.push_back(names[j]);
    }
  }
  if (!fit.dropped.empty()) {
    std::string list;
    for (const auto& d : fit.dropped) list += (list.empty() ? "" : ", ") + d;
    if (!options.drop_collinear) throw RankDeficientError("design is rank deficient; collinear columns: " + list);
    fit.warnings.push_back("dropped constant or collinear columns: " + list);
  }

  const auto n = design.rows();
  const auto p = static_cast<Eigen::Index>(kept.size());
  if (n <= p) {
    throw InsufficientDataError("need more observations than columns (n=" + std::to_string(n) +
                                ", p=" + std::to_string(p) + ")");
  }
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index k = 0; k < p; ++k) x.col(k) = design.col(kept[static_cast<size_t>(k)]);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd q_thin = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  fit.beta = r.triangularView<Eigen::Upper>().solve(q_thin.transpose() * y);
  fit.fitted = x * fit.beta;
  fit.residuals = y - fit.fitted;
  fit.leverages = q_thin.rowwise().squaredNorm();
  fit.rss = fit.residuals.squaredNorm();
  fit.n = static_cast<int>(n);
  fit.p = static_cast<int>(p);
  fit.sigma_hat = std::sqrt(fit.rss / static_cast<double>(n - p));
  return fit;
}

Eigen::VectorXd studentized_residuals(const LeastSquaresFit& fit) {
  return studentized_residuals(fit, UndefinedRows::Throw);
}

Eigen::VectorXd studentized_residuals(const LeastSquaresFit& fit, UndefinedRows policy) {
  Eigen::VectorXd r(fit.residuals.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double one_minus_h = 1.0 - fit.leverages(i);
    if (one_minus_h <= 1e-9) {
      if (policy == UndefinedRows::MarkNaN) {
        r(i) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      throw UndefinedResidualError("row " + std::to_string(i) + " has leverage 1; its studentized residual is undefined");
    }
    const double e = fit.residuals(i);
    r(i) = e == 0.0 ? 0.0 : e / (fit.sigma_hat * std::sqrt(one_minus_h));
  }
  return r;
}

}  // namespace kakari
