#pragma once

#include <span>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/models.hpp"

namespace fwmix {

// Ordinary least squares probe (intercept + one weight per feature),
// solved by normal equations with partial-pivot elimination. Small
// dimensions only; used as a distribution-robust reference model.
class LinearProbe final : public Predictor {
 public:
  static LinearProbe fit(const Dataset& train);

  double predict(std::span<const double> x) const override;
  std::size_t dimension() const override;

  double intercept() const { return intercept_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double intercept_ = 0.0;
  std::vector<double> weights_;
};

}  // namespace fwmix
