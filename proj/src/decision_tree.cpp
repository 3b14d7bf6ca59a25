#include <algorithm>
#include <limits>
#include <numeric>

#include "fwmix/common.hpp"
#include "model_states.hpp"

namespace fwmix::detail {

namespace {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

class TreeState final : public ModelState {
 public:
  TreeState(std::vector<TreeNode> nodes, std::size_t dim)
      : nodes_(std::move(nodes)), dim_(dim) {}

  ModelKind kind() const override { return ModelKind::dt; }
  std::size_t dimension() const override { return dim_; }

  double predict(std::span<const double> x) const override {
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(node)];
      node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(node)].value;
  }

  nlohmann::ordered_json to_json() const override { return node_json(0); }

 private:
  nlohmann::ordered_json node_json(int index) const {
    const TreeNode& n = nodes_[static_cast<std::size_t>(index)];
    nlohmann::ordered_json j;
    if (n.feature < 0) {
      j["value"] = n.value;
      return j;
    }
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_json(n.left);
    j["right"] = node_json(n.right);
    return j;
  }

  std::vector<TreeNode> nodes_;
  std::size_t dim_;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& train, const DtParams& params) : train_(train), params_(params) {}

  std::vector<TreeNode> build(const std::vector<std::size_t>& rows) {
    const std::size_t m = train_.dim();
    // Per-feature row lists sorted by (value, row index); partitions stay
    // stable so every node keeps this invariant without re-sorting.
    std::vector<std::vector<std::size_t>> lists(m);
    for (std::size_t j = 0; j < m; ++j) {
      lists[j] = rows;
      std::stable_sort(lists[j].begin(), lists[j].end(),
                       [&](std::size_t a, std::size_t b) {
                         return train_.features(a)[j] < train_.features(b)[j];
                       });
    }
    nodes_.clear();
    grow(std::move(lists), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left_count = 0;
    bool found = false;
  };

  int grow(std::vector<std::vector<std::size_t>> lists, int depth) {
    const std::size_t n = lists[0].size();
    double y_sum = 0.0;
    for (std::size_t row : lists[0]) y_sum += train_.target(row);
    const double mean = y_sum / static_cast<double>(n);

    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[static_cast<std::size_t>(index)].value = mean;

    const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
    if (!depth_ok || n < static_cast<std::size_t>(params_.min_samples_split)) return index;

    const Split split = best_split(lists, y_sum);
    if (!split.found) return index;

    auto [left_lists, right_lists] = partition(std::move(lists), split);
    const int left = grow(std::move(left_lists), depth + 1);
    const int right = grow(std::move(right_lists), depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  // Maximizes sum_L^2/n_L + sum_R^2/n_R over every feature and every midpoint
  // between distinct consecutive values. Strict improvement over the parent
  // score breaks ties toward the lowest feature, then the lowest threshold.
  Split best_split(const std::vector<std::vector<std::size_t>>& lists, double y_sum) const {
    const std::size_t n = lists[0].size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    const double parent_score = y_sum * y_sum / static_cast<double>(n);
    double best = parent_score;
    Split split;
    for (std::size_t j = 0; j < lists.size(); ++j) {
      double sum_left = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        sum_left += train_.target(lists[j][i]);
        const double lo = train_.features(lists[j][i])[j];
        const double hi = train_.features(lists[j][i + 1])[j];
        if (!(lo < hi)) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;
        const double sum_right = y_sum - sum_left;
        const double score =
            sum_left * sum_left / static_cast<double>(n_left) +
            sum_right * sum_right / static_cast<double>(n - n_left);
        if (score > best) {
          best = score;
          double t = lo + (hi - lo) / 2.0;
          if (!(t < hi)) t = lo;  // midpoint rounded up: keep the split boundary exact
          split.feature = j;
          split.threshold = t;
          split.left_count = n_left;
          split.found = true;
        }
      }
    }
    return split;
  }

  std::pair<std::vector<std::vector<std::size_t>>, std::vector<std::vector<std::size_t>>>
  partition(std::vector<std::vector<std::size_t>> lists, const Split& split) const {
    const std::size_t m = lists.size();
    const std::size_t n = lists[0].size();
    std::vector<std::vector<std::size_t>> left(m), right(m);
    for (std::size_t j = 0; j < m; ++j) {
      left[j].reserve(split.left_count);
      right[j].reserve(n - split.left_count);
      for (std::size_t row : lists[j]) {
        if (train_.features(row)[split.feature] <= split.threshold)
          left[j].push_back(row);
        else
          right[j].push_back(row);
      }
    }
    return {std::move(left), std::move(right)};
  }

  const Dataset& train_;
  const DtParams& params_;
  std::vector<TreeNode> nodes_;
};

void validate_params(const DtParams& params) {
  require_config(params.min_samples_split >= 2, "dt.min_samples_split: must be >= 2");
  require_config(params.min_samples_leaf >= 1, "dt.min_samples_leaf: must be >= 1");
  require_config(!params.max_depth || *params.max_depth >= 0, "dt.max_depth: must be >= 0");
}

}  // namespace

std::shared_ptr<const ModelState> fit_tree_rows(const Dataset& train, const DtParams& params,
                                                const std::vector<std::size_t>& rows) {
  validate_params(params);
  require_config(!rows.empty(), "dt: empty training set");
  TreeBuilder builder(train, params);
  return std::make_shared<TreeState>(builder.build(rows), train.dim());
}

std::shared_ptr<const ModelState> fit_tree(const Dataset& train, const DtParams& params) {
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree_rows(train, params, rows);
}

}  // namespace fwmix::detail
