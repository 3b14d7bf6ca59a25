#include <numeric>

#include "fwmix/common.hpp"
#include "model_states.hpp"

namespace fwmix::detail {

namespace {

class ForestState final : public ModelState {
 public:
  ForestState(std::vector<std::shared_ptr<const ModelState>> trees, std::size_t dim)
      : trees_(std::move(trees)), dim_(dim) {}

  ModelKind kind() const override { return ModelKind::rf; }
  std::size_t dimension() const override { return dim_; }

  double predict(std::span<const double> x) const override {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree->predict(x);
    return sum / static_cast<double>(trees_.size());
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["n_trees"] = trees_.size();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) arr.push_back(tree->to_json());
    j["trees"] = std::move(arr);
    return j;
  }

 private:
  std::vector<std::shared_ptr<const ModelState>> trees_;
  std::size_t dim_;
};

}  // namespace

std::shared_ptr<const ModelState> fit_forest(const Dataset& train, const RfParams& params,
                                             const SeedSpec& seed) {
  require_config(params.n_trees >= 1, "rf.n_trees: must be >= 1");
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  const std::size_t n = train.size();

  std::vector<std::shared_ptr<const ModelState>> trees(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      // Each tree draws its resample from its own substream, so the forest is
      // identical at any thread count.
      RandomStream rng(seed.substream("tree", t));
      for (std::size_t i = 0; i < n; ++i) rows[i] = rng.uniform_index(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees[t] = fit_tree_rows(train, params.tree, rows);
  });
  return std::make_shared<ForestState>(std::move(trees), train.dim());
}

}  // namespace fwmix::detail
