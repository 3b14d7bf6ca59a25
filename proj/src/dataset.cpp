#include "fwmix/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fwmix/common.hpp"

namespace fwmix {

Dataset::Dataset(std::vector<std::string> feature_names, std::string target_name)
    : feature_names_(std::move(feature_names)), target_name_(std::move(target_name)) {
  require(!feature_names_.empty(), "dataset: need at least one feature");
  require(!target_name_.empty(), "dataset: empty target name");
  std::set<std::string> seen;
  for (const auto& name : feature_names_) {
    require(!name.empty(), "dataset: empty feature name");
    require(name != target_name_, "dataset: feature name collides with target '" + name + "'");
    require(seen.insert(name).second, "dataset: duplicate feature name '" + name + "'");
  }
}

void Dataset::reserve(std::size_t n) {
  x_.reserve(n * dim());
  y_.reserve(n);
  region_.reserve(n);
}

void Dataset::append(std::span<const double> features, double target, std::string region) {
  require(features.size() == dim(), "append: feature dimension mismatch");
  for (double v : features) require(is_finite(v), "append: non-finite feature value");
  require(is_finite(target), "append: non-finite target value");
  x_.insert(x_.end(), features.begin(), features.end());
  y_.push_back(target);
  region_.push_back(std::move(region));
}

void Dataset::append_row(const Dataset& other, std::size_t i) {
  require(i < other.size(), "append_row: index out of range");
  append(other.features(i), other.target(i), other.region(i));
}

std::set<std::string> Dataset::region_labels() const {
  std::set<std::string> labels;
  for (const auto& r : region_)
    if (!r.empty()) labels.insert(r);
  return labels;
}

bool Dataset::has_regions() const {
  for (const auto& r : region_)
    if (!r.empty()) return true;
  return false;
}

std::vector<double> Dataset::feature_column(std::size_t j) const {
  require(j < dim(), "feature_column: index out of range");
  std::vector<double> col(size());
  for (std::size_t i = 0; i < size(); ++i) col[i] = x_[i * dim() + j];
  return col;
}

bool Dataset::operator==(const Dataset& other) const {
  return feature_names_ == other.feature_names_ && target_name_ == other.target_name_ &&
         x_ == other.x_ && y_ == other.y_ && region_ == other.region_;
}

SummaryStats summary_stats(const Dataset& dataset) {
  require(!dataset.empty(), "summary_stats: empty dataset");
  SummaryStats out;
  out.n = dataset.size();
  const std::size_t m = dataset.dim();
  out.features.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    FeatureStats& fs = out.features[j];
    fs.name = dataset.feature_names()[j];
    fs.min = std::numeric_limits<double>::infinity();
    fs.max = -std::numeric_limits<double>::infinity();
    KahanSum sum;
    for (std::size_t i = 0; i < out.n; ++i) {
      const double v = dataset.features(i)[j];
      sum.add(v);
      fs.min = std::min(fs.min, v);
      fs.max = std::max(fs.max, v);
    }
    fs.mean = sum.value() / static_cast<double>(out.n);
    if (out.n >= 2) {
      KahanSum sq;
      for (std::size_t i = 0; i < out.n; ++i) {
        const double d = dataset.features(i)[j] - fs.mean;
        sq.add(d * d);
      }
      fs.variance = sq.value() / static_cast<double>(out.n - 1);
    }
  }
  for (std::size_t i = 0; i < out.n; ++i) {
    const std::string& r = dataset.region(i);
    if (!r.empty()) ++out.region_counts[r];
  }
  return out;
}

HoldoutSplit split_holdout(const Dataset& dataset, double test_fraction, const SeedSpec& seed) {
  const std::size_t n = dataset.size();
  require(n >= 2, "split_holdout: need at least 2 samples");
  require(test_fraction > 0.0 && test_fraction < 1.0, "split_holdout: fraction outside (0,1)");
  const auto test_n =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  require(test_n >= 1 && test_n < n, "split_holdout: fraction leaves a side empty");

  RandomStream rng(seed);
  std::vector<std::size_t> order = rng.shuffled_indices(n);

  HoldoutSplit split;
  split.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_n));
  split.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(test_n), order.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());

  split.train = Dataset(dataset.feature_names(), dataset.target_name());
  split.test = Dataset(dataset.feature_names(), dataset.target_name());
  split.train.reserve(n - test_n);
  split.test.reserve(test_n);
  for (std::size_t i : split.train_indices) split.train.append_row(dataset, i);
  for (std::size_t i : split.test_indices) split.test.append_row(dataset, i);
  return split;
}

}  // namespace fwmix
