#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace fwmix {

class Dataset;
class Predictor;

double mse(std::span<const double> truth, std::span<const double> pred);
double mae(std::span<const double> truth, std::span<const double> pred);
double rmse(std::span<const double> truth, std::span<const double> pred);

double mse_on(const Predictor& model, const Dataset& data);

// Percent drop from a region-trained model's error to the mixed-trained
// one: (regional - mixed) / regional * 100. Negative when mixing hurts.
struct BiasReduction {
  double mse_regional = 0.0;
  double mse_mixed = 0.0;
  double delta_percent = 0.0;
};
BiasReduction delta_bias(double mse_regional, double mse_mixed);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 0.0;  // two-sided
};

// Paired two-sided t-test on elementwise differences. Zero-variance
// differences: p = 0 when their mean is nonzero, p = 1 otherwise.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Mean signed residual (y - prediction) per region tag, pooled over all
// given datasets. Every row must carry a tag.
std::map<std::string, double> residual_region_means(
    const Predictor& model, const std::vector<Dataset>& datasets);
std::map<std::string, double> residual_region_means(const Predictor& model,
                                                    const Dataset& data);

}  // namespace fwmix
