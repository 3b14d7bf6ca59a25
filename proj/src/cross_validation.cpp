#include "fwmix/cross_validation.hpp"

#include <cmath>

#include "fwmix/common.hpp"
#include "fwmix/metrics.hpp"

namespace fwmix {

CVResult make_cv_result(std::vector<double> fold_mses) {
  require(!fold_mses.empty(), "make_cv_result: no folds");
  CVResult out;
  out.k = static_cast<int>(fold_mses.size());
  out.mean_mse = mean_of(fold_mses);
  out.sem = fold_mses.size() >= 2
                ? sample_sd(fold_mses) / std::sqrt(static_cast<double>(fold_mses.size()))
                : 0.0;
  out.error_bar = 2.0 * out.sem;
  out.fold_mses = std::move(fold_mses);
  return out;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, const SeedSpec& seed) {
  require_config(k >= 2, "cv.k: must be >= 2");
  require_config(static_cast<std::size_t>(k) <= n,
                 "cv.k: more folds than samples (" + std::to_string(k) + " > " +
                     std::to_string(n) + ")");
  RandomStream rng(seed);
  const std::vector<std::size_t> order = rng.shuffled_indices(n);

  // Contiguous chunks of the shuffled order; the first n % k folds take the
  // extra sample.
  const auto uk = static_cast<std::size_t>(k);
  const std::size_t base = n / uk;
  const std::size_t extra = n % uk;
  std::vector<std::vector<std::size_t>> folds(uk);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < uk; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(folds[f].begin(), folds[f].end());
    pos += len;
  }
  return folds;
}

CVResult cross_validate(const Dataset& data, const Hyperparams& hp, int k,
                        const SeedSpec& cv_seed, const FoldPrep& prep,
                        const Dataset* holdout) {
  const auto folds = kfold_split(data.size(), k, cv_seed);
  const auto uk = folds.size();

  std::vector<double> fold_mses(uk);
  parallel_for(uk, [&](std::size_t f) {
    std::vector<char> in_test(data.size(), 0);
    for (std::size_t row : folds[f]) in_test[row] = 1;
    Dataset train(data.feature_names(), data.target_name());
    train.reserve(data.size() - folds[f].size());
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!in_test[i]) train.append_row(data, i);
    Dataset eval(data.feature_names(), data.target_name());
    if (holdout) {
      eval = *holdout;
    } else {
      eval.reserve(folds[f].size());
      for (std::size_t row : folds[f]) eval.append_row(data, row);
    }
    if (prep) {
      auto prepped = prep(std::move(train), std::move(eval), static_cast<int>(f));
      train = std::move(prepped.first);
      eval = std::move(prepped.second);
    }
    require_config(!train.empty(), "cv: fold " + std::to_string(f) + " has no training rows");
    Hyperparams fold_hp = hp;
    fold_hp.seed = cv_seed.substream("fold", f);
    const FittedModel model = train_model(train, fold_hp);
    fold_mses[f] = mse_on(model, eval);
  });
  return make_cv_result(std::move(fold_mses));
}

}  // namespace fwmix
