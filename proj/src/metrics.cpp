#include "fwmix/metrics.hpp"

#include <cmath>
#include <limits>

#include "fwmix/common.hpp"
#include "fwmix/dataset.hpp"
#include "fwmix/models.hpp"
#include "fwmix/stats.hpp"

namespace fwmix {

namespace {

void check_lengths(std::span<const double> truth, std::span<const double> pred) {
  require(truth.size() == pred.size(), "metrics: length mismatch");
  require(!truth.empty(), "metrics: empty input");
}

}  // namespace

double mse(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  KahanSum sum;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    sum.add(d * d);
  }
  return sum.value() / static_cast<double>(truth.size());
}

double mae(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred);
  KahanSum sum;
  for (std::size_t i = 0; i < truth.size(); ++i) sum.add(std::fabs(truth[i] - pred[i]));
  return sum.value() / static_cast<double>(truth.size());
}

double rmse(std::span<const double> truth, std::span<const double> pred) {
  return std::sqrt(mse(truth, pred));
}

double mse_on(const Predictor& model, const Dataset& data) {
  const std::vector<double> pred = model.predict_all(data);
  return mse(data.targets(), pred);
}

BiasReduction delta_bias(double mse_regional, double mse_mixed) {
  require(mse_regional > 0.0, "delta_bias: regional MSE must be positive");
  BiasReduction out;
  out.mse_regional = mse_regional;
  out.mse_mixed = mse_mixed;
  out.delta_percent = (mse_regional - mse_mixed) / mse_regional * 100.0;
  return out;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "paired_t_test: length mismatch");
  require(a.size() >= 2, "paired_t_test: need at least 2 pairs");
  const std::size_t k = a.size();
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = a[i] - b[i];
  const double m = mean_of(d);
  const double sd = sample_sd(d);

  TTestResult out;
  out.df = static_cast<int>(k) - 1;
  if (sd == 0.0) {
    if (m == 0.0) {
      out.t = 0.0;
      out.p = 1.0;
    } else {
      out.t = m > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
      out.p = 0.0;
    }
    return out;
  }
  out.t = m / (sd / std::sqrt(static_cast<double>(k)));
  out.p = student_t_two_sided_p(out.t, out.df);
  return out;
}

std::map<std::string, double> residual_region_means(const Predictor& model,
                                                    const std::vector<Dataset>& datasets) {
  require(!datasets.empty(), "residual_region_means: no datasets");
  std::map<std::string, KahanSum> sums;
  std::map<std::string, std::size_t> counts;
  for (const Dataset& data : datasets) {
    const std::vector<double> pred = model.predict_all(data);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::string& tag = data.region(i);
      require(!tag.empty(), "residual_region_means: untagged sample");
      sums[tag].add(data.target(i) - pred[i]);
      ++counts[tag];
    }
  }
  std::map<std::string, double> out;
  for (const auto& [tag, sum] : sums)
    out[tag] = sum.value() / static_cast<double>(counts[tag]);
  return out;
}

std::map<std::string, double> residual_region_means(const Predictor& model, const Dataset& data) {
  return residual_region_means(model, std::vector<Dataset>{data});
}

}  // namespace fwmix
