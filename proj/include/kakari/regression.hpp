#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kakari {

struct FitOptions {
  // Drop columns that lie in the span of earlier ones instead of failing.
  bool drop_collinear = true;
  // A column is collinear when its residual after projection onto the kept
  // columns is at most tol * its own norm.
  double collinearity_tol = 1e-9;
};

// Ordinary least squares via Householder QR.
struct LeastSquaresFit {
  std::vector<std::string> columns;  // retained, in design order
  std::vector<std::string> dropped;
  std::vector<std::string> warnings;
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::VectorXd leverages;  // diagonal of the hat matrix
  double rss = 0;
  double sigma_hat = 0;  // sqrt(rss / (n - p))
  int n = 0;
  int p = 0;
};

// Throws RankDeficientError (collinear columns named) when dropping is
// disabled, InsufficientDataError when n <= p after dropping.
LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                  const std::vector<std::string>& names, const FitOptions& options = {});

// Internally studentized residuals r_i = e_i / (sigma_hat * sqrt(1 - h_i)).
// A row with zero residual gets 0. Throws UndefinedResidualError when some
// h_i is 1.
Eigen::VectorXd studentized_residuals(const LeastSquaresFit& fit);

enum class UndefinedRows { Throw, MarkNaN };
Eigen::VectorXd studentized_residuals(const LeastSquaresFit& fit, UndefinedRows policy);

}  // namespace kakari
