#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/models.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

struct CVResult {
  std::vector<double> fold_mses;
  double mean_mse = 0.0;
  double sem = 0.0;        // sd(fold_mses) / sqrt(k), n-1 variance
  double error_bar = 0.0;  // 2 * sem
  int k = 0;
};

CVResult make_cv_result(std::vector<double> fold_mses);

// Shuffled k-fold assignment: fold sizes differ by at most one, the
// shuffle is driven entirely by `seed`.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  const SeedSpec& seed);

// Per-fold rewrite hook, applied after the split so fold-local work
// (augmentation, standardization) never sees held-out rows.
using FoldPrep = std::function<std::pair<Dataset, Dataset>(
    Dataset train, Dataset test, int fold)>;

// k-fold CV of one model family on one dataset. Folds run through
// parallel_for; each fold trains on its own substream seed/<fold>.
// `holdout`: evaluate every fold-trained model on this fixed set instead
// of the fold's own held-out rows.
CVResult cross_validate(const Dataset& data, const Hyperparams& hp, int k,
                        const SeedSpec& cv_seed,
                        const FoldPrep& prep = nullptr,
                        const Dataset* holdout = nullptr);

}  // namespace fwmix
