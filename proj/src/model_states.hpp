#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "fwmix/dataset.hpp"
#include "fwmix/models.hpp"
#include "fwmix/random.hpp"

namespace fwmix::detail {

// Immutable fitted-model internals shared by FittedModel handles.
class ModelState {
 public:
  virtual ~ModelState() = default;
  virtual ModelKind kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual double predict(std::span<const double> x) const = 0;
  virtual bool convergence_warning() const { return false; }
  virtual nlohmann::ordered_json to_json() const = 0;
};

std::shared_ptr<const ModelState> fit_tree(const Dataset& train, const DtParams& params);

// Fits a tree on an explicit multiset of row indices (bootstrap resample).
std::shared_ptr<const ModelState> fit_tree_rows(const Dataset& train, const DtParams& params,
                                                const std::vector<std::size_t>& rows);

std::shared_ptr<const ModelState> fit_forest(const Dataset& train, const RfParams& params,
                                             const SeedSpec& seed);

std::shared_ptr<const ModelState> fit_knn(const Dataset& train, const KnnParams& params);

std::shared_ptr<const ModelState> fit_svr(const Dataset& train, const SvrParams& params,
                                          std::vector<double>* dual_objective_trace);

std::optional<SvrDualView> svr_view(const ModelState& state);

}  // namespace fwmix::detail
