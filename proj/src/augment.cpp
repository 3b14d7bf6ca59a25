#include "fwmix/augment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "fwmix/common.hpp"
#include "fwmix/stats.hpp"

namespace fwmix {

void AugmentConfig::validate() const {
  require_config(expansion_factor >= 1, "augment.expansion_factor: must be >= 1");
  require_config(noise_scale >= 0.0 && is_finite(noise_scale),
                 "augment.noise_scale: must be >= 0");
  require_config(target_noise_scale >= 0.0 && is_finite(target_noise_scale),
                 "augment.target_noise_scale: must be >= 0");
}

Dataset augment(const Dataset& dataset, const AugmentConfig& config) {
  config.validate();
  require(dataset.size() >= 2, "augment: need at least 2 samples for feature sd");
  const std::size_t n = dataset.size();
  const std::size_t m = dataset.dim();

  std::vector<double> noise_sd(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double sd = sample_sd(dataset.feature_column(j));
    if (sd == 0.0 && config.noise_scale > 0.0) {
      std::cerr << "augment: feature '" << dataset.feature_names()[j]
                << "' has zero variance, copied unchanged\n";
    }
    noise_sd[j] = config.noise_scale * sd;
  }
  double target_sd = 0.0;
  if (config.noise_target) {
    const double sd = sample_sd(dataset.targets());
    if (sd == 0.0 && config.target_noise_scale > 0.0)
      std::cerr << "augment: target has zero variance, copied unchanged\n";
    target_sd = config.target_noise_scale * sd;
  }

  RandomStream rng(config.seed);
  Dataset out(dataset.feature_names(), dataset.target_name());
  out.reserve(n * static_cast<std::size_t>(config.expansion_factor));
  std::vector<double> x(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto base = dataset.features(i);
    for (int k = 0; k < config.expansion_factor; ++k) {
      for (std::size_t j = 0; j < m; ++j)
        x[j] = noise_sd[j] > 0.0 ? base[j] + rng.normal(0.0, noise_sd[j]) : base[j];
      double y = dataset.target(i);
      if (target_sd > 0.0) y += rng.normal(0.0, target_sd);
      out.append(x, y, dataset.region(i));
    }
  }
  return out;
}

KSResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::vector<double> sa = a;
  std::vector<double> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    const double v = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= v) ++ia;
    while (ib < sb.size() && sb[ib] <= v) ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }

  KSResult out;
  out.d = d;
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  out.p = kolmogorov_q(lambda);
  return out;
}

KSReport fidelity_report(const Dataset& original, const Dataset& augmented) {
  require(original.feature_names() == augmented.feature_names(),
          "fidelity_report: feature names differ");
  KSReport report;
  report.feature_names = original.feature_names();
  report.per_feature.resize(original.dim());
  parallel_for(original.dim(), [&](std::size_t j) {
    report.per_feature[j] = ks_two_sample(original.feature_column(j), augmented.feature_column(j));
  });
  for (const KSResult& r : report.per_feature)
    report.overall_max_d = std::max(report.overall_max_d, r.d);
  return report;
}

std::string ks_report_to_json(const KSReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json features = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
    features[report.feature_names[i]] = {{"d", report.per_feature[i].d},
                                         {"p", report.per_feature[i].p}};
  }
  j["per_feature"] = std::move(features);
  j["overall_max_d"] = report.overall_max_d;
  return j.dump(2) + "\n";
}

}  // namespace fwmix
