#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fwmix/random.hpp"

using namespace fwmix;

TEST_CASE("substream labels extend with a slash") {
  const SeedSpec root{7, "a"};
  CHECK(root.substream("b").stream_label == "a/b");
  CHECK(root.substream("b").master_seed == 7);
  CHECK(root.substream("b", 3).stream_label == "a/b/3");
}

TEST_CASE("streams are reproducible and label-separated") {
  RandomStream a1(SeedSpec{42, "x"});
  RandomStream a2(SeedSpec{42, "x"});
  RandomStream b(SeedSpec{42, "y"});
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a1.next_u64();
    all_equal = all_equal && va == a2.next_u64();
    any_diff = any_diff || va != b.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform01 stays in [0,1) with the right mean") {
  RandomStream rng(SeedSpec{1, "u"});
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform01();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    sum += v;
  }
  CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("uniform_index is unbiased over a small range") {
  RandomStream rng(SeedSpec{2, "idx"});
  std::vector<int> counts(8, 0);
  for (int i = 0; i < 16000; ++i) counts[rng.uniform_index(8)]++;
  for (int c : counts) {
    CHECK(c > 1700);  // expect 2000, allow wide slack
    CHECK(c < 2300);
  }
}

TEST_CASE("normal draws match the requested moments") {
  RandomStream rng(SeedSpec{3, "n"});
  std::vector<double> draws(20000);
  for (double& d : draws) d = rng.normal(1.5, 2.0);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= draws.size() - 1;
  CHECK(mean == doctest::Approx(1.5).epsilon(0.05));
  CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("shuffled_indices is a deterministic permutation") {
  RandomStream rng(SeedSpec{4, "s"});
  const auto p = rng.shuffled_indices(200);
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);

  RandomStream rng2(SeedSpec{4, "s"});
  CHECK(rng2.shuffled_indices(200) == p);
  CHECK(p != rng.shuffled_indices(200));  // stream advanced
}
