#pragma once

#include <string>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

// Replicate-then-noise expansion. Each input row spawns expansion_factor
// copies; copy k of row i gets independent Gaussian noise with per-feature
// sd = noise_scale * sd(feature). Targets are left untouched unless
// noise_target is set.
struct AugmentConfig {
  int expansion_factor = 31;
  double noise_scale = 0.05;
  bool noise_target = false;
  double target_noise_scale = 0.02;
  SeedSpec seed;

  void validate() const;
};

struct KSResult {
  double d = 0.0;
  double p = 1.0;
};

struct KSReport {
  std::vector<std::string> feature_names;
  std::vector<KSResult> per_feature;
  double overall_max_d = 0.0;
};

Dataset augment(const Dataset& dataset, const AugmentConfig& config);

// Two-sample Kolmogorov-Smirnov test. D is the exact sup-distance between
// the two empirical CDFs; p uses the asymptotic Kolmogorov series
//   Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
// with lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D and
// ne = na*nb/(na+nb), truncated when a term drops below 1e-10.
KSResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

// Per-feature KS between an original dataset and its augmented version.
KSReport fidelity_report(const Dataset& original, const Dataset& augmented);

std::string ks_report_to_json(const KSReport& report);

}  // namespace fwmix
