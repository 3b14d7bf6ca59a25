#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "fwmix/augment.hpp"
#include "fwmix/common.hpp"
#include "fwmix/dataset.hpp"
#include "test_util.hpp"

using namespace fwmix;

TEST_CASE("augment replicates every row factor times") {
  Dataset d({"a", "b"});
  const std::vector<double> r0{1.0, 10.0};
  const std::vector<double> r1{2.0, 20.0};
  const std::vector<double> r2{3.0, 30.0};
  d.append(r0, 0.5, "west");
  d.append(r1, 1.5, "east");
  d.append(r2, 2.5, "west");

  AugmentConfig config;
  config.expansion_factor = 4;
  config.noise_scale = 0.05;
  config.seed = SeedSpec{3, "aug"};
  const Dataset out = augment(d, config);

  CHECK(out.size() == 12);
  CHECK(out.feature_names() == d.feature_names());
  // Copies keep the source row's target and tag; the originals are not
  // kept verbatim, their copies stand in for them.
  std::map<double, std::size_t> target_counts;
  for (std::size_t i = 0; i < out.size(); ++i) ++target_counts[out.target(i)];
  CHECK(target_counts[0.5] == 4);
  CHECK(target_counts[1.5] == 4);
  CHECK(target_counts[2.5] == 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.region(i) == (out.target(i) == 1.5 ? "east" : "west"));
  }

  CHECK(augment(d, config) == out);
  AugmentConfig reseeded = config;
  reseeded.seed = SeedSpec{4, "aug"};
  CHECK_FALSE(augment(d, reseeded) == out);
}

TEST_CASE("augment noise has the configured per-feature scale") {
  // One row with many copies isolates the injected noise: the copies'
  // deviation from the source value has sd = noise_scale * sd(column).
  const Dataset base = fwtest::random_dataset(5000, 2, 77);
  const SummaryStats stats = summary_stats(base);

  AugmentConfig config;
  config.expansion_factor = 3;
  config.noise_scale = 0.05;
  config.seed = SeedSpec{21, "aug"};
  const Dataset out = augment(base, config);

  for (std::size_t j = 0; j < 2; ++j) {
    const double want_sd = 0.05 * std::sqrt(*stats.features[j].variance);
    std::vector<double> deviations;
    deviations.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      // Copy k of source row s lands at index s*factor + k.
      const std::size_t src = i / 3;
      deviations.push_back(out.features(i)[j] - base.features(src)[j]);
    }
    const double got_sd = sample_sd(deviations);
    CHECK(std::abs(got_sd / want_sd - 1.0) <= 0.01);
    CHECK(std::abs(mean_of(deviations)) <= 3.0 * want_sd / std::sqrt(15000.0) * 1.5);
  }
  // Targets stay exact when target noise is off.
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.target(i) == base.target(i / 3));
  }
}

TEST_CASE("augment can also perturb targets") {
  const Dataset base = fwtest::random_dataset(2000, 1, 5);
  AugmentConfig config;
  config.expansion_factor = 2;
  config.noise_target = true;
  config.target_noise_scale = 0.1;
  config.seed = SeedSpec{6, "aug"};
  const Dataset out = augment(base, config);

  const double base_sd = sample_sd(base.targets());
  std::vector<double> dev;
  for (std::size_t i = 0; i < out.size(); ++i) {
    dev.push_back(out.target(i) - base.target(i / 2));
  }
  CHECK(sample_sd(dev) == doctest::Approx(0.1 * base_sd).epsilon(0.05));
}

TEST_CASE("zero-variance columns are copied unchanged") {
  Dataset d({"flat", "live"});
  RandomStream rng(SeedSpec{1, "fixture"});
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> row{7.0, rng.normal(0.0, 1.0)};
    d.append(row, 0.0);
  }
  AugmentConfig config;
  config.expansion_factor = 2;
  config.seed = SeedSpec{9, "aug"};
  const Dataset out = augment(d, config);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.features(i)[0] == 7.0);
  // The live column still moves.
  bool moved = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.features(i)[1] != d.features(i / 2)[1]) moved = true;
  }
  CHECK(moved);
}

TEST_CASE("augment config validation") {
  const Dataset d = fwtest::random_dataset(3, 1, 2);
  AugmentConfig config;
  config.expansion_factor = 0;
  CHECK_THROWS_AS(augment(d, config), ConfigError);
  config.expansion_factor = 2;
  config.noise_scale = -0.5;
  CHECK_THROWS_AS(augment(d, config), ConfigError);
  config.noise_scale = 0.05;
  config.target_noise_scale = -1.0;
  CHECK_THROWS_AS(augment(d, config), ConfigError);
  config.target_noise_scale = 0.02;
  Dataset empty({"a"});
  CHECK_THROWS_AS(augment(empty, config), std::invalid_argument);
}

TEST_CASE("ks statistic on a hand-walked fixture") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{2.0, 3.0, 4.0, 5.0};
  const KSResult r = ks_two_sample(a, b);
  // Max ECDF gap is 1/4, reached below 2 and above 4.
  CHECK(r.d == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.p == doctest::Approx(0.9968756885202121).epsilon(1e-9));

  const KSResult sym = ks_two_sample(b, a);
  CHECK(sym.d == r.d);
  CHECK(sym.p == r.p);

  const KSResult same = ks_two_sample(a, a);
  CHECK(same.d == 0.0);
  CHECK(same.p == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> lo{1.0, 2.0, 3.0};
  const std::vector<double> hi{10.0, 11.0, 12.0};
  const KSResult disjoint = ks_two_sample(lo, hi);
  CHECK(disjoint.d == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(disjoint.p == doctest::Approx(0.03262165165202116).epsilon(1e-9));

  const std::vector<double> empty;
  CHECK_THROWS_AS(ks_two_sample(a, empty), std::invalid_argument);
}

TEST_CASE("ks distance grows with distribution shift") {
  RandomStream rng(SeedSpec{31, "ks"});
  std::vector<double> base(400);
  for (double& v : base) v = rng.normal(0.0, 1.0);
  double last_d = -1.0;
  for (double shift : {0.0, 0.5, 1.0, 2.0}) {
    std::vector<double> moved(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) moved[i] = base[i] + shift;
    const KSResult r = ks_two_sample(base, moved);
    CHECK(r.d >= last_d);
    last_d = r.d;
  }
  CHECK(last_d > 0.5);
}

TEST_CASE("fidelity report covers every feature") {
  const Dataset base = fwtest::random_dataset(800, 3, 13);
  AugmentConfig config;
  config.expansion_factor = 5;
  config.noise_scale = 0.05;
  config.seed = SeedSpec{17, "aug"};
  const Dataset out = augment(base, config);

  const KSReport report = fidelity_report(base, out);
  REQUIRE(report.feature_names.size() == 3);
  REQUIRE(report.per_feature.size() == 3);
  CHECK(report.feature_names == base.feature_names());
  double max_d = 0.0;
  for (const KSResult& r : report.per_feature) {
    CHECK(r.d >= 0.0);
    CHECK(r.d <= 1.0);
    max_d = std::max(max_d, r.d);
    // Small replicate noise keeps each marginal close to the source.
    CHECK(r.d <= 0.05);
    CHECK(r.p > 0.05);
  }
  CHECK(report.overall_max_d == doctest::Approx(max_d).epsilon(1e-15));

  const Dataset other = fwtest::random_dataset(800, 2, 14);
  CHECK_THROWS_AS(fidelity_report(base, other), std::invalid_argument);
}
