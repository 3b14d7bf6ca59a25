#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fwmix {

// Names a reproducible random stream: one master seed for the whole run,
// one label per consuming stage. Equal (seed, label) pairs always yield
// the same stream; different labels yield independent streams. Stages
// derive child streams by extending the label, so results cannot depend
// on scheduling or evaluation order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::string stream_label;

  SeedSpec substream(std::string_view child) const {
    return SeedSpec{master_seed, stream_label + "/" + std::string(child)};
  }
  SeedSpec substream(std::string_view child, std::size_t index) const {
    return SeedSpec{master_seed,
                    stream_label + "/" + std::string(child) + "/" + std::to_string(index)};
  }
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic random stream. All sampling primitives are implemented
// explicitly (no std::*_distribution) so identical draws come out on any
// standard library.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& spec);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), unbiased. n must be > 0.
  std::size_t uniform_index(std::size_t n);
  // Standard normal via Marsaglia polar, scaled to (mean, sd).
  double normal(double mean = 0.0, double sd = 1.0);
  // Fisher-Yates over indices [0, n).
  std::vector<std::size_t> shuffled_indices(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fwmix
