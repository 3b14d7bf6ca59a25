#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwmix {

enum class ModelKind { dt, rf, knn, svr };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct DtParams {
  std::optional<int> max_depth;  // absent = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
};

struct RfParams {
  int n_trees = 100;
  bool bootstrap = true;
  DtParams tree;
};

struct KnnParams {
  int k = 5;
};

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  // gamma <= 0 means "scale": 1 / (m * overall feature variance), computed
  // on the internally standardized training matrix.
  double gamma = 0.0;
  double kkt_tol = 1e-3;
  int max_passes = 50;
};

struct Hyperparams {
  ModelKind kind = ModelKind::dt;
  DtParams dt;
  RfParams rf;
  KnnParams knn;
  SvrParams svr;
  SeedSpec seed;

  static Hyperparams of(ModelKind kind, const SeedSpec& seed = {}) {
    Hyperparams hp;
    hp.kind = kind;
    hp.seed = seed;
    return hp;
  }
};

// Anything that maps a feature vector to a real. Models, the linear
// probe, and test fixtures all satisfy this.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(std::span<const double> x) const = 0;
  virtual std::size_t dimension() const = 0;

  std::vector<double> predict_all(const Dataset& dataset) const;
};

namespace detail {
class ModelState;
}

// Immutable trained regressor with a uniform predict contract. Cheap to
// copy (shared state) and safe to share across threads.
class FittedModel final : public Predictor {
 public:
  FittedModel() = default;
  explicit FittedModel(std::shared_ptr<const detail::ModelState> state);

  ModelKind kind() const;
  double predict(std::span<const double> x) const override;
  std::size_t dimension() const override;
  // Set when SVR ran out of its pass budget before meeting the KKT
  // tolerance; the model is still usable (best iterate).
  bool convergence_warning() const;

  std::string to_json() const;

  const detail::ModelState* state() const { return state_.get(); }

 private:
  std::shared_ptr<const detail::ModelState> state_;
};

FittedModel train_decision_tree(const Dataset& train, const Hyperparams& hp);
FittedModel train_random_forest(const Dataset& train, const Hyperparams& hp);
FittedModel train_knn(const Dataset& train, const Hyperparams& hp);
FittedModel train_svr(const Dataset& train, const Hyperparams& hp);
FittedModel train_model(const Dataset& train, const Hyperparams& hp);

// Test hooks -----------------------------------------------------------

// SVR fit that records the exact dual objective after every accepted
// pair update (O(n^2) per sample, test sizes only).
FittedModel train_svr_traced(const Dataset& train, const Hyperparams& hp,
                             std::vector<double>* dual_objective_trace);

// Dual state of a fitted SVR for feasibility checks: beta_i = alpha_i -
// alpha*_i in [-C, C], bias, and the resolved gamma. Null for other kinds.
struct SvrDualView {
  std::span<const double> beta;
  double bias;
  double c;
  double epsilon;
  double gamma;
};
std::optional<SvrDualView> svr_dual_view(const FittedModel& model);

}  // namespace fwmix
