#pragma once

#include <string>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

// One synthetic region: Gaussian features with region-specific moments
// plus a constant target offset standing in for context bias.
struct RegionSpec {
  std::string region_id;
  std::size_t n = 0;
  std::vector<double> mu;      // per-feature mean
  std::vector<double> sigma2;  // per-feature variance, strictly positive
  double bias_offset = 0.0;    // added to every target in this region
};

struct GeneratorConfig {
  std::vector<double> theta;    // shared linear coefficients
  double target_noise_sd = 0.5;
  std::vector<RegionSpec> regions;
  SeedSpec seed;

  std::size_t dim() const { return theta.size(); }
  void validate() const;  // throws ConfigError naming the offending field
};

// x ~ N(mu, diag(sigma2)), y = theta.x + bias_offset + N(0, target_noise_sd^2).
// Deterministic given the config seed; each region draws from its own
// labeled substream, so regions can be generated in any order.
Dataset generate_region(const RegionSpec& spec, const GeneratorConfig& config);
std::vector<Dataset> generate_suite(const GeneratorConfig& config);

// Stock three-region configuration used by the bench harness and tests:
// m=2, theta=(0.8,-0.4), sigma2=1 per feature, region means staggered by
// one unit, target offsets (0,1,2) in target-noise units scaled by
// offset_scale. centered shifts the offsets to mean zero.
GeneratorConfig default_suite_config(std::uint64_t master_seed, std::size_t n_per_region = 23000,
                                     double offset_scale = 1.0, bool centered = false);

}  // namespace fwmix
