#include "fwmix/baselines.hpp"

#include <algorithm>
#include <optional>

#include "fwmix/common.hpp"

namespace fwmix {

namespace {

void check_regions(const std::vector<Dataset>& regions, const char* op) {
  require_config(!regions.empty(), std::string(op) + ": no input regions");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    require_config(!regions[r].empty(),
                   std::string(op) + ": region " + std::to_string(r) + " is empty");
    require_config(regions[r].feature_names() == regions[0].feature_names(),
                   std::string(op) + ": region " + std::to_string(r) +
                       " has different feature names");
  }
}

std::string region_display_id(const Dataset& region, std::size_t index) {
  const auto labels = region.region_labels();
  if (labels.size() == 1) return *labels.begin();
  return "r" + std::to_string(index);
}

// Indices of the k nearest neighbours of row `base` within `region`, the row
// itself excluded, ordered by (squared distance, index).
std::vector<std::size_t> nearest_neighbours(const Dataset& region, std::size_t base,
                                            std::size_t k) {
  const std::size_t n = region.size();
  const std::size_t m = region.dim();
  const auto xb = region.features(base);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == base) continue;
    const auto xi = region.features(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = xi[j] - xb[j];
      d2 += diff * diff;
    }
    dist.emplace_back(d2, i);
  }
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

}  // namespace

Dataset smote_balance(const std::vector<Dataset>& regions, const SmoteConfig& config,
                      std::vector<SmoteProvenance>* provenance) {
  check_regions(regions, "smote");
  require_config(config.k_neighbors >= 1, "smote.k_neighbors: must be >= 1");
  const auto k = static_cast<std::size_t>(config.k_neighbors);
  std::size_t target_size = 0;
  for (const Dataset& d : regions) target_size = std::max(target_size, d.size());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions[r].size() < target_size)
      require_config(regions[r].size() > k,
                     "smote: region '" + region_display_id(regions[r], r) +
                         "' needs more than k_neighbors=" + std::to_string(k) +
                         " samples to synthesize");
  }

  const std::size_t m = regions[0].dim();
  Dataset out(regions[0].feature_names(), regions[0].target_name());
  if (provenance) provenance->clear();

  std::vector<std::pair<std::size_t, std::size_t>> rows;  // (region, row) incl. synthetic slots
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (std::size_t i = 0; i < regions[r].size(); ++i) rows.emplace_back(r, i);

  // Synthetic rows are staged per region, then everything is shuffled so
  // original and synthetic samples interleave.
  std::vector<Dataset> synth;
  synth.reserve(regions.size());
  std::vector<double> x(m);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const Dataset& region = regions[r];
    const std::string id = region_display_id(region, r);
    Dataset rows_r(region.feature_names(), region.target_name());
    const std::size_t need = target_size - region.size();
    if (need > 0) {
      RandomStream rng(config.seed.substream(id));
      std::vector<std::optional<std::vector<std::size_t>>> nn_cache(region.size());
      for (std::size_t s = 0; s < need; ++s) {
        const std::size_t base = rng.uniform_index(region.size());
        if (!nn_cache[base]) nn_cache[base] = nearest_neighbours(region, base, k);
        const std::size_t neighbour = (*nn_cache[base])[rng.uniform_index(k)];
        const double lambda = rng.uniform01();
        const auto xb = region.features(base);
        const auto xn = region.features(neighbour);
        for (std::size_t j = 0; j < m; ++j) x[j] = xb[j] + lambda * (xn[j] - xb[j]);
        const double y = region.target(base) + lambda * (region.target(neighbour) -
                                                         region.target(base));
        rows_r.append(x, y, id);
        if (provenance) provenance->push_back({id, base, neighbour, lambda});
      }
    }
    for (std::size_t i = 0; i < rows_r.size(); ++i)
      rows.emplace_back(regions.size() + synth.size(), i);
    synth.push_back(std::move(rows_r));
  }

  RandomStream shuffle_rng(config.seed.substream("shuffle"));
  shuffle_rng.shuffle(rows);
  out.reserve(rows.size());
  for (const auto& [r, i] : rows) {
    const Dataset& src = r < regions.size() ? regions[r] : synth[r - regions.size()];
    if (r < regions.size()) {
      // Originals may be untagged; tag them with their region id on the way out.
      out.append(src.features(i), src.target(i), region_display_id(src, r));
    } else {
      out.append_row(src, i);
    }
  }
  return out;
}

Dataset reweight_resample(const std::vector<Dataset>& regions, const ReweightConfig& config) {
  check_regions(regions, "reweight");
  require_config(regions.size() >= 2, "reweight: needs at least 2 regions");

  std::size_t n_total = 0;
  for (const Dataset& d : regions) n_total += d.size();

  std::vector<std::string> ids(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) ids[r] = region_display_id(regions[r], r);

  // Weighted bootstrap with w_r = N / (R n_r): picking the region uniformly
  // and then a member uniformly draws each sample with probability
  // proportional to its weight.
  RandomStream rng(config.seed);
  Dataset out(regions[0].feature_names(), regions[0].target_name());
  out.reserve(n_total);
  for (std::size_t i = 0; i < n_total; ++i) {
    const std::size_t r = rng.uniform_index(regions.size());
    const std::size_t row = rng.uniform_index(regions[r].size());
    out.append(regions[r].features(row), regions[r].target(row), ids[r]);
  }
  return out;
}

double reweight_weight(std::size_t n_total, std::size_t n_regions, std::size_t region_size) {
  require(n_regions >= 1 && region_size >= 1 && n_total >= region_size,
          "reweight_weight: invalid counts");
  return static_cast<double>(n_total) /
         (static_cast<double>(n_regions) * static_cast<double>(region_size));
}

}  // namespace fwmix
