#include "fwmix/stats.hpp"

#include <cmath>

#include "fwmix/common.hpp"

namespace fwmix {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double eps = 3e-16;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "incomplete beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = bt * beta_continued_fraction(a, b, x) / a;
  } else {
    result = 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
  }
  if (result < 0.0) return 0.0;
  if (result > 1.0) return 1.0;
  return result;
}

double student_t_two_sided_p(double t, int df) {
  require(df >= 1, "t-test: df must be >= 1");
  if (std::isinf(t)) return 0.0;
  const double d = static_cast<double>(df);
  return regularized_incomplete_beta(d / 2.0, 0.5, d / (d + t * t));
}

double kolmogorov_q(double lambda) {
  if (lambda <= 1e-8) return 1.0;
  KahanSum sum;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    const double kk = static_cast<double>(k);
    const double term = 2.0 * std::exp(-2.0 * kk * kk * lambda * lambda);
    if (term < 1e-10) break;
    sum.add(sign * term);
    sign = -sign;
  }
  const double q = sum.value();
  if (q < 0.0) return 0.0;
  if (q > 1.0) return 1.0;
  return q;
}

}  // namespace fwmix
