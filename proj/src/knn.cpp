#include <algorithm>

#include "fwmix/common.hpp"
#include "model_states.hpp"

namespace fwmix::detail {

namespace {

class KnnState final : public ModelState {
 public:
  KnnState(const Dataset& train, std::size_t k) : k_(k), n_(train.size()), dim_(train.dim()) {
    x_.reserve(n_ * dim_);
    y_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto row = train.features(i);
      x_.insert(x_.end(), row.begin(), row.end());
      y_.push_back(train.target(i));
    }
  }

  ModelKind kind() const override { return ModelKind::knn; }
  std::size_t dimension() const override { return dim_; }

  // Neighbour order is (squared distance, training index) lexicographic, so
  // distance ties resolve to the earliest training row.
  double predict(std::span<const double> x) const override {
    std::vector<std::pair<double, std::size_t>> dist(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = x_.data() + i * dim_;
      double d2 = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        const double diff = x[j] - row[j];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    const auto mid = static_cast<std::ptrdiff_t>(k_);
    if (k_ < n_) std::nth_element(dist.begin(), dist.begin() + (mid - 1), dist.end());
    std::sort(dist.begin(), dist.begin() + mid);
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) sum += y_[dist[i].second];
    return sum / static_cast<double>(k_);
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["k"] = k_;
    j["n_train"] = n_;
    return j;
  }

 private:
  std::size_t k_;
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> x_;
  std::vector<double> y_;
};

}  // namespace

std::shared_ptr<const ModelState> fit_knn(const Dataset& train, const KnnParams& params) {
  require_config(params.k >= 1, "knn.k: must be >= 1");
  require_config(static_cast<std::size_t>(params.k) <= train.size(),
                 "knn.k: larger than the training set");
  return std::make_shared<KnnState>(train, static_cast<std::size_t>(params.k));
}

}  // namespace fwmix::detail
