#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

struct SmoteConfig {
  int k_neighbors = 5;
  SeedSpec seed;
};

struct ReweightConfig {
  SeedSpec seed;
};

// Provenance of one synthetic SMOTE row, recorded for tests: the emitted
// sample is base + lambda * (neighbor - base) in both x and y.
struct SmoteProvenance {
  std::string region;
  std::size_t base_index;      // index into that region's dataset
  std::size_t neighbor_index;  // same-region index
  double lambda;
};

// Oversamples every region up to the size of the largest one. Synthetic
// rows interpolate between a uniformly chosen base sample and one of its
// k nearest same-region neighbors (Euclidean distance over features),
// with the target interpolated alongside. Output = originals + synthetics,
// shuffled. Requires every region to have more than k_neighbors samples.
Dataset smote_balance(const std::vector<Dataset>& regions, const SmoteConfig& config,
                      std::vector<SmoteProvenance>* provenance = nullptr);

// Inverse-frequency weighted bootstrap over the pooled regions: sample i
// from region r has weight N/(R*n_r); output is N draws with replacement,
// so every region's expected share is 1/R. Needs >= 2 regions.
Dataset reweight_resample(const std::vector<Dataset>& regions, const ReweightConfig& config);

// Weight assigned to each sample of region r (N total, R regions).
double reweight_weight(std::size_t n_total, std::size_t n_regions, std::size_t region_size);

}  // namespace fwmix
