#include "fwmix/linear_probe.hpp"

#include <cmath>

#include "fwmix/common.hpp"

namespace fwmix {

namespace {

// Solves A w = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    require(std::fabs(a[pivot][col]) > 1e-12, "linear probe: singular normal equations");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> w(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * w[c];
    w[r] = acc / a[r][r];
  }
  return w;
}

}  // namespace

LinearProbe LinearProbe::fit(const Dataset& train) {
  require(train.size() >= train.dim() + 1, "linear probe: more parameters than samples");
  const std::size_t m = train.dim();
  const std::size_t p = m + 1;  // intercept first

  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto x = train.features(i);
    const double y = train.target(i);
    std::vector<double> row(p);
    row[0] = 1.0;
    for (std::size_t j = 0; j < m; ++j) row[j + 1] = x[j];
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += row[a] * y;
      for (std::size_t b = 0; b <= a; ++b) xtx[a][b] += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) xtx[a][b] = xtx[b][a];

  const std::vector<double> w = solve_linear(std::move(xtx), std::move(xty));
  LinearProbe probe;
  probe.intercept_ = w[0];
  probe.weights_.assign(w.begin() + 1, w.end());
  return probe;
}

double LinearProbe::predict(std::span<const double> x) const {
  require(x.size() == weights_.size(), "linear probe: dimension mismatch");
  double acc = intercept_;
  for (std::size_t j = 0; j < weights_.size(); ++j) acc += weights_[j] * x[j];
  return acc;
}

std::size_t LinearProbe::dimension() const { return weights_.size(); }

}  // namespace fwmix
