#pragma once

// Textbook hat-matrix construction with plain loops, independent of the QR path.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kakari::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix invert(Matrix a) {
  const size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14) throw std::runtime_error("singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = a[col][col];
    for (size_t k = 0; k < n; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0) continue;
      for (size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

struct HatResult {
  std::vector<double> beta, residuals, leverages, studentized;
  double sigma_hat = 0;
};

// x is n rows of p values.
inline HatResult hat_matrix_fit(const Matrix& x, const std::vector<double>& y) {
  const size_t n = x.size(), p = x[0].size();
  Matrix xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t a = 0; a < p; ++a) {
      xty[a] += x[i][a] * y[i];
      for (size_t b = 0; b < p; ++b) xtx[a][b] += x[i][a] * x[i][b];
    }
  const Matrix inv = invert(xtx);
  HatResult r;
  r.beta.assign(p, 0.0);
  for (size_t a = 0; a < p; ++a)
    for (size_t b = 0; b < p; ++b) r.beta[a] += inv[a][b] * xty[b];

  // H = X (X'X)^-1 X'
  Matrix h(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double s = 0;
      for (size_t a = 0; a < p; ++a)
        for (size_t b = 0; b < p; ++b) s += x[i][a] * inv[a][b] * x[j][b];
      h[i][j] = s;
    }
  double rss = 0;
  r.residuals.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double fitted = 0;
    for (size_t j = 0; j < n; ++j) fitted += h[i][j] * y[j];
    r.residuals[i] = y[i] - fitted;
    rss += r.residuals[i] * r.residuals[i];
    r.leverages.push_back(h[i][i]);
  }
  r.sigma_hat = std::sqrt(rss / static_cast<double>(n - p));
  for (size_t i = 0; i < n; ++i)
    r.studentized.push_back(r.residuals[i] / (r.sigma_hat * std::sqrt(1.0 - h[i][i])));
  return r;
}

}  // namespace kakari::oracle
