#include "fwmix/mixing.hpp"

#include <cmath>

#include "fwmix/common.hpp"

namespace fwmix {

std::string to_string(MixMode mode) {
  return mode == MixMode::convex_blend ? "convex_blend" : "pooled";
}

MixMode mix_mode_from_string(const std::string& s) {
  if (s == "convex_blend" || s == "convex") return MixMode::convex_blend;
  if (s == "pooled") return MixMode::pooled;
  throw ConfigError("mix.mode: unknown mode '" + s + "'");
}

void MixConfig::validate(std::size_t n_regions) const {
  require_config(alpha.size() == n_regions,
                 "mix.alpha: expected " + std::to_string(n_regions) + " weights, got " +
                     std::to_string(alpha.size()));
  KahanSum sum;
  for (double a : alpha) {
    require_config(a >= 0.0 && is_finite(a), "mix.alpha: weights must be >= 0");
    sum.add(a);
  }
  require_config(std::fabs(sum.value() - 1.0) <= 1e-12, "mix.alpha: weights must sum to 1");
  require_config(mix_noise_sd < 0.0 || is_finite(mix_noise_sd),
                 "mix.mix_noise_sd: non-finite value");
}

namespace {

void check_regions(const std::vector<Dataset>& regions) {
  require_config(!regions.empty(), "mix: no input regions");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    require_config(!regions[r].empty(), "mix: region " + std::to_string(r) + " is empty");
    require_config(regions[r].feature_names() == regions[0].feature_names(),
                   "mix: region " + std::to_string(r) + " has different feature names");
  }
}

std::size_t total_rows(const std::vector<Dataset>& regions) {
  std::size_t n = 0;
  for (const Dataset& d : regions) n += d.size();
  return n;
}

std::string region_display_id(const Dataset& region, std::size_t index) {
  const auto labels = region.region_labels();
  if (labels.size() == 1) return *labels.begin();
  return "r" + std::to_string(index);
}

}  // namespace

MixConfig MixConfig::resolved(const std::vector<Dataset>& regions) const {
  check_regions(regions);
  MixConfig out = *this;
  if (out.mix_noise_sd < 0.0) {
    // Auto scale: 0.05 times the pooled per-feature sd, averaged over
    // features, mirroring the augmentation noise convention.
    const std::size_t m = regions[0].dim();
    KahanSum sd_sum;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> pooled;
      pooled.reserve(total_rows(regions));
      for (const Dataset& d : regions) {
        for (std::size_t i = 0; i < d.size(); ++i) pooled.push_back(d.features(i)[j]);
      }
      sd_sum.add(pooled.size() >= 2 ? sample_sd(pooled) : 0.0);
    }
    out.mix_noise_sd = 0.05 * sd_sum.value() / static_cast<double>(m);
  }
  if (out.output_n == 0) out.output_n = total_rows(regions);
  return out;
}

Dataset mix_convex(const std::vector<Dataset>& regions, const MixConfig& config,
                   std::vector<std::string>* provenance_tags) {
  check_regions(regions);
  config.validate(regions.size());
  require(config.mode == MixMode::convex_blend, "mix_convex: config mode is not convex_blend");
  const MixConfig cfg = config.is_resolved() ? config : config.resolved(regions);

  const std::size_t u_regions = regions.size();
  const std::size_t m = regions[0].dim();
  const std::size_t n_out = cfg.output_n;

  std::vector<std::string> region_ids(u_regions);
  for (std::size_t r = 0; r < u_regions; ++r) region_ids[r] = region_display_id(regions[r], r);

  std::vector<double> out_x(n_out * m);
  std::vector<double> out_y(n_out);
  std::vector<std::size_t> out_prov(n_out);

  parallel_for(n_out, [&](std::size_t i) {
    RandomStream rng(cfg.seed.substream("row", i));
    double* x = out_x.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) x[j] = 0.0;
    double y = 0.0;
    for (std::size_t r = 0; r < u_regions; ++r) {
      const std::size_t pick = rng.uniform_index(regions[r].size());
      const auto xr = regions[r].features(pick);
      for (std::size_t j = 0; j < m; ++j) x[j] += cfg.alpha[r] * xr[j];
      y += cfg.alpha[r] * regions[r].target(pick);
    }
    for (std::size_t j = 0; j < m; ++j) x[j] += rng.normal(0.0, cfg.mix_noise_sd);
    out_y[i] = y;
    out_prov[i] = rng.uniform_index(u_regions);
  });

  Dataset out(regions[0].feature_names(), regions[0].target_name());
  out.reserve(n_out);
  if (provenance_tags) {
    provenance_tags->clear();
    provenance_tags->reserve(n_out);
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    out.append({out_x.data() + i * m, m}, out_y[i], "mixed");
    if (provenance_tags) provenance_tags->push_back(region_ids[out_prov[i]]);
  }
  return out;
}

Dataset mix_pooled(const std::vector<Dataset>& regions, const MixConfig& config) {
  check_regions(regions);
  config.validate(regions.size());
  require(config.mode == MixMode::pooled, "mix_pooled: config mode is not pooled");
  const MixConfig cfg = config.is_resolved() ? config : config.resolved(regions);

  std::vector<std::pair<std::size_t, std::size_t>> picks;  // (region, row)
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto count = static_cast<std::size_t>(std::llround(
        cfg.alpha[r] * static_cast<double>(cfg.output_n)));
    RandomStream rng(cfg.seed.substream("pool", r));
    for (std::size_t i = 0; i < count; ++i)
      picks.emplace_back(r, rng.uniform_index(regions[r].size()));
  }
  RandomStream shuffle_rng(cfg.seed.substream("shuffle"));
  shuffle_rng.shuffle(picks);

  Dataset out(regions[0].feature_names(), regions[0].target_name());
  out.reserve(picks.size());
  for (const auto& [r, i] : picks) out.append_row(regions[r], i);
  return out;
}

Dataset mix(const std::vector<Dataset>& regions, const MixConfig& config,
            std::vector<std::string>* provenance_tags) {
  if (config.mode == MixMode::convex_blend) return mix_convex(regions, config, provenance_tags);
  Dataset out = mix_pooled(regions, config);
  if (provenance_tags) {
    provenance_tags->clear();
    provenance_tags->reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) provenance_tags->push_back(out.region(i));
  }
  return out;
}

MomentPrediction predict_moments(const std::vector<RegionMoments>& region_stats,
                                 const MixConfig& config) {
  require(config.mode == MixMode::convex_blend,
          "predict_moments: only the convex blend has these moments");
  require(config.mix_noise_sd >= 0.0, "predict_moments: unresolved mix_noise_sd");
  config.validate(region_stats.size());
  require(!region_stats.empty(), "predict_moments: no region stats");
  const std::size_t m = region_stats[0].mu.size();
  for (const RegionMoments& s : region_stats)
    require(s.mu.size() == m && s.sigma2.size() == m, "predict_moments: dimension mismatch");

  MomentPrediction out;
  out.mean.assign(m, 0.0);
  out.variance.assign(m, config.mix_noise_sd * config.mix_noise_sd);
  for (std::size_t r = 0; r < region_stats.size(); ++r) {
    const double a = config.alpha[r];
    for (std::size_t j = 0; j < m; ++j) {
      out.mean[j] += a * region_stats[r].mu[j];
      out.variance[j] += a * a * region_stats[r].sigma2[j];
    }
  }
  return out;
}

std::vector<double> context_feature_covariance(const Dataset& dataset, const std::string& region) {
  require(dataset.size() >= 2, "context_feature_covariance: need at least 2 samples");
  require(dataset.has_regions(), "context_feature_covariance: untagged dataset");
  const auto labels = dataset.region_labels();
  require(labels.count(region) > 0,
          "context_feature_covariance: unknown region '" + region + "'");

  const std::size_t n = dataset.size();
  const std::size_t m = dataset.dim();
  std::size_t n_in = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dataset.region(i) == region) ++n_in;
  const double c_mean = static_cast<double>(n_in) / static_cast<double>(n);

  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::vector<double> col = dataset.feature_column(j);
    const double x_mean = mean_of(col);
    KahanSum sum;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = dataset.region(i) == region ? 1.0 : 0.0;
      sum.add((col[i] - x_mean) * (c - c_mean));
    }
    out[j] = sum.value() / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace fwmix
