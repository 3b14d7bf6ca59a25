#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fwmix/random.hpp"

namespace fwmix {

// Tabular dataset: a feature matrix with aligned targets and per-row
// region tags. Region tags are metadata, never features; nothing that
// trains a model reads a tag's value. An empty tag means "untagged".
// Rows are immutable once appended and all values are checked finite.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::string target_name = "target");

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return feature_names_.size(); }
  bool empty() const { return y_.empty(); }

  void reserve(std::size_t n);
  void append(std::span<const double> features, double target, std::string region = "");
  void append_row(const Dataset& other, std::size_t i);

  std::span<const double> features(std::size_t i) const {
    return {x_.data() + i * dim(), dim()};
  }
  double target(std::size_t i) const { return y_[i]; }
  const std::string& region(std::size_t i) const { return region_[i]; }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::string& target_name() const { return target_name_; }
  const std::vector<double>& targets() const { return y_; }

  // Distinct non-empty tags, sorted.
  std::set<std::string> region_labels() const;
  bool has_regions() const;

  // Column j as a contiguous vector (copies).
  std::vector<double> feature_column(std::size_t j) const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<std::string> feature_names_;
  std::string target_name_ = "target";
  std::vector<double> x_;  // row-major, size n*m
  std::vector<double> y_;
  std::vector<std::string> region_;
};

struct FeatureStats {
  std::string name;
  double mean = 0.0;
  std::optional<double> variance;  // n-1 denominator; absent when n < 2
  double min = 0.0;
  double max = 0.0;
};

struct SummaryStats {
  std::size_t n = 0;
  std::vector<FeatureStats> features;
  std::map<std::string, std::size_t> region_counts;  // non-empty tags only
};

SummaryStats summary_stats(const Dataset& dataset);

struct HoldoutSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Seeded shuffle split; test size = round(n * test_fraction). Throws if
// either side would be empty.
HoldoutSplit split_holdout(const Dataset& dataset, double test_fraction, const SeedSpec& seed);

}  // namespace fwmix
