#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "fwmix/baselines.hpp"
#include "fwmix/common.hpp"
#include "fwmix/dataset.hpp"
#include "test_util.hpp"

using namespace fwmix;

namespace {

using RowKey = std::vector<double>;

RowKey key_of(const Dataset& d, std::size_t i) {
  RowKey k(d.features(i).begin(), d.features(i).end());
  k.push_back(d.target(i));
  return k;
}

std::multiset<RowKey> row_multiset(const Dataset& d) {
  std::multiset<RowKey> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.insert(key_of(d, i));
  return out;
}

std::vector<Dataset> tagged_regions(const std::vector<std::size_t>& sizes) {
  std::vector<Dataset> out;
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    out.push_back(fwtest::random_dataset(sizes[r], 2, 100 + r, "g" + std::to_string(r)));
  }
  return out;
}

// Brute-force k nearest same-region neighbors of base, excluding itself.
std::set<std::size_t> knn_of(const Dataset& d, std::size_t base, int k) {
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i == base) continue;
    double d2 = 0.0;
    for (std::size_t j = 0; j < d.dim(); ++j) {
      const double diff = d.features(i)[j] - d.features(base)[j];
      d2 += diff * diff;
    }
    dist.emplace_back(d2, i);
  }
  std::sort(dist.begin(), dist.end());
  std::set<std::size_t> out;
  for (int i = 0; i < k; ++i) out.insert(dist[i].second);
  return out;
}

}  // namespace

TEST_CASE("smote on balanced regions is a pure shuffle") {
  const std::vector<Dataset> regions = tagged_regions({20, 20, 20});
  SmoteConfig config;
  config.k_neighbors = 5;
  config.seed = SeedSpec{7, "smote"};
  std::vector<SmoteProvenance> prov;
  const Dataset out = smote_balance(regions, config, &prov);

  CHECK(out.size() == 60);
  CHECK(prov.empty());
  std::multiset<RowKey> want;
  for (const Dataset& r : regions) {
    const auto rows = row_multiset(r);
    want.insert(rows.begin(), rows.end());
  }
  CHECK(row_multiset(out) == want);
  // Determinism plus an actual reordering.
  CHECK(smote_balance(regions, config) == out);
  bool reordered = false;
  for (std::size_t i = 0; i < 20 && !reordered; ++i) {
    if (!(key_of(out, i) == key_of(regions[0], i))) reordered = true;
  }
  CHECK(reordered);
}

TEST_CASE("smote balances every region to the largest") {
  const std::vector<Dataset> regions = tagged_regions({12, 30, 18});
  SmoteConfig config;
  config.k_neighbors = 4;
  config.seed = SeedSpec{8, "smote"};
  std::vector<SmoteProvenance> prov;
  const Dataset out = smote_balance(regions, config, &prov);

  CHECK(out.size() == 90);
  CHECK(prov.size() == (30 - 12) + (30 - 18));
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < out.size(); ++i) ++counts[out.region(i)];
  CHECK(counts["g0"] == 30);
  CHECK(counts["g1"] == 30);
  CHECK(counts["g2"] == 30);
}

TEST_CASE("smote synthetics interpolate real neighbor pairs") {
  const std::vector<Dataset> regions = tagged_regions({10, 25});
  SmoteConfig config;
  config.k_neighbors = 3;
  config.seed = SeedSpec{9, "smote"};
  std::vector<SmoteProvenance> prov;
  const Dataset out = smote_balance(regions, config, &prov);
  REQUIRE(prov.size() == 15);

  const std::multiset<RowKey> emitted = row_multiset(out);
  for (const SmoteProvenance& p : prov) {
    CHECK(p.region == "g0");
    const Dataset& src = regions[0];
    REQUIRE(p.base_index < src.size());
    REQUIRE(p.neighbor_index < src.size());
    CHECK(p.base_index != p.neighbor_index);
    CHECK(p.lambda >= 0.0);
    CHECK(p.lambda < 1.0);
    // The neighbor really is one of the base's k nearest.
    const std::set<std::size_t> nn = knn_of(src, p.base_index, 3);
    CHECK(nn.count(p.neighbor_index) == 1);
    // Reconstruct the row and find it among the emitted ones.
    RowKey want;
    for (std::size_t j = 0; j < src.dim(); ++j) {
      const double a = src.features(p.base_index)[j];
      const double b = src.features(p.neighbor_index)[j];
      want.push_back(a + p.lambda * (b - a));
    }
    const double ya = src.target(p.base_index);
    const double yb = src.target(p.neighbor_index);
    want.push_back(ya + p.lambda * (yb - ya));
    CHECK(emitted.count(want) > 0);
  }
}

TEST_CASE("smote tags originals with their region id") {
  // Untagged inputs still come out tagged by position in the region list.
  std::vector<Dataset> regions;
  regions.push_back(fwtest::random_dataset(8, 1, 1));
  regions.push_back(fwtest::random_dataset(8, 1, 2));
  SmoteConfig config;
  config.k_neighbors = 2;
  config.seed = SeedSpec{10, "smote"};
  const Dataset out = smote_balance(regions, config);
  std::set<std::string> tags;
  for (std::size_t i = 0; i < out.size(); ++i) tags.insert(out.region(i));
  CHECK(tags == std::set<std::string>{"r0", "r1"});
}

TEST_CASE("smote rejects regions too small for the neighborhood") {
  const std::vector<Dataset> regions = tagged_regions({4, 30});
  SmoteConfig config;
  config.k_neighbors = 4;
  config.seed = SeedSpec{11, "smote"};
  // Region 0 must synthesize but has only k samples.
  CHECK_THROWS_AS(smote_balance(regions, config), ConfigError);

  SmoteConfig smaller = config;
  smaller.k_neighbors = 3;
  CHECK(smote_balance(regions, smaller).size() == 60);

  SmoteConfig zero = config;
  zero.k_neighbors = 0;
  CHECK_THROWS_AS(smote_balance(regions, zero), ConfigError);
}

TEST_CASE("reweight resample equalizes expected region shares") {
  const std::vector<Dataset> regions = tagged_regions({1000, 2000, 6000});
  ReweightConfig config;
  config.seed = SeedSpec{12, "rw"};
  const Dataset out = reweight_resample(regions, config);

  CHECK(out.size() == 9000);
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < out.size(); ++i) ++counts[out.region(i)];
  // Each region's share is Binomial(9000, 1/3): mean 3000, sd ~44.7.
  for (const char* id : {"g0", "g1", "g2"}) {
    CHECK(counts[id] > 3000 - 180);
    CHECK(counts[id] < 3000 + 180);
  }

  // Every row is a verbatim member of its tagged region.
  std::map<std::string, std::multiset<RowKey>> source;
  for (const Dataset& r : regions) source[r.region(0)] = row_multiset(r);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(source[out.region(i)].count(key_of(out, i)) > 0);
  }

  CHECK(reweight_resample(regions, config) == out);
}

TEST_CASE("reweight needs at least two regions") {
  const std::vector<Dataset> one = tagged_regions({10});
  ReweightConfig config;
  config.seed = SeedSpec{13, "rw"};
  CHECK_THROWS_AS(reweight_resample(one, config), ConfigError);
}

TEST_CASE("reweight weights are inverse region frequency") {
  // N = 9000, R = 3: weight for a region of 1000 is 9000/(3*1000) = 3.
  CHECK(reweight_weight(9000, 3, 1000) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(reweight_weight(9000, 3, 6000) == doctest::Approx(0.5).epsilon(1e-15));
  // Weighted total mass is N: sum over regions of n_r * w_r.
  const double mass = 1000 * reweight_weight(9000, 3, 1000) +
                      2000 * reweight_weight(9000, 3, 2000) +
                      6000 * reweight_weight(9000, 3, 6000);
  CHECK(mass == doctest::Approx(9000.0).epsilon(1e-12));
  CHECK_THROWS_AS(reweight_weight(9000, 0, 1000), std::invalid_argument);
  CHECK_THROWS_AS(reweight_weight(9000, 3, 0), std::invalid_argument);
}
