#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

enum class MixMode { convex_blend, pooled };

std::string to_string(MixMode mode);
MixMode mix_mode_from_string(const std::string& s);

// Weights alpha must be nonnegative and sum to 1 within 1e-12. output_n
// is the emitted sample count (for pooled mode, 0 means "sum of region
// sizes"). mix_noise_sd < 0 means "auto": 0.05 * pooled per-feature sd,
// resolved against the input regions before mixing.
struct MixConfig {
  std::vector<double> alpha;
  double mix_noise_sd = -1.0;  // negative = auto
  MixMode mode = MixMode::convex_blend;
  std::size_t output_n = 0;
  SeedSpec seed;

  void validate(std::size_t n_regions) const;
  // Returns a copy with mix_noise_sd made concrete (auto -> per-feature
  // pooled sd average * 0.05) and output_n defaulted.
  MixConfig resolved(const std::vector<Dataset>& regions) const;
  bool is_resolved() const { return mix_noise_sd >= 0.0 && output_n > 0; }
};

struct MomentPrediction {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Convex blend: every output row draws one sample (uniformly, with
// replacement) from each region, takes the alpha-weighted feature and
// target combination, and adds N(0, mix_noise_sd^2) to each feature.
// Output rows are tagged "mixed". When provenance_tags is non-null it
// receives, per output row, the id of one uniformly chosen contributing
// region; diagnostics use these labels to measure how much region
// identity remains recoverable from the blended features.
Dataset mix_convex(const std::vector<Dataset>& regions, const MixConfig& config,
                   std::vector<std::string>* provenance_tags = nullptr);

// Pooled union: region r contributes round(alpha_r * output_n) rows drawn
// uniformly with replacement, original tags preserved, order shuffled.
Dataset mix_pooled(const std::vector<Dataset>& regions, const MixConfig& config);

// Dispatches on config.mode.
Dataset mix(const std::vector<Dataset>& regions, const MixConfig& config,
            std::vector<std::string>* provenance_tags = nullptr);

struct RegionMoments {
  std::vector<double> mu;
  std::vector<double> sigma2;
};

// Analytic moments of the convex blend: mean = sum alpha_r mu_r,
// variance = sum alpha_r^2 sigma_r^2 + mix_noise_sd^2 (componentwise).
// Rejects pooled mode, whose output is a mixture, not a blend.
MomentPrediction predict_moments(const std::vector<RegionMoments>& region_stats,
                                 const MixConfig& config);

// Sample covariance (n-1 denominator) between each feature and the 0/1
// indicator of "row is tagged `region`".
std::vector<double> context_feature_covariance(const Dataset& dataset, const std::string& region);

}  // namespace fwmix
