#include "fwmix/models.hpp"

#include "fwmix/common.hpp"
#include "model_states.hpp"

namespace fwmix {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::dt: return "dt";
    case ModelKind::rf: return "rf";
    case ModelKind::knn: return "knn";
    case ModelKind::svr: return "svr";
  }
  throw std::invalid_argument("to_string: bad ModelKind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "dt") return ModelKind::dt;
  if (s == "rf") return ModelKind::rf;
  if (s == "knn") return ModelKind::knn;
  if (s == "svr") return ModelKind::svr;
  throw ConfigError("models: unknown model kind '" + s + "'");
}

std::vector<double> Predictor::predict_all(const Dataset& dataset) const {
  require(dataset.dim() == dimension(), "predict_all: dimension mismatch");
  std::vector<double> out(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) { out[i] = predict(dataset.features(i)); });
  return out;
}

FittedModel::FittedModel(std::shared_ptr<const detail::ModelState> state)
    : state_(std::move(state)) {
  require(state_ != nullptr, "FittedModel: null state");
}

ModelKind FittedModel::kind() const {
  require(state_ != nullptr, "FittedModel: not trained");
  return state_->kind();
}

double FittedModel::predict(std::span<const double> x) const {
  require(state_ != nullptr, "FittedModel: not trained");
  require(x.size() == state_->dimension(), "predict: dimension mismatch");
  return state_->predict(x);
}

std::size_t FittedModel::dimension() const {
  require(state_ != nullptr, "FittedModel: not trained");
  return state_->dimension();
}

bool FittedModel::convergence_warning() const {
  require(state_ != nullptr, "FittedModel: not trained");
  return state_->convergence_warning();
}

std::string FittedModel::to_json() const {
  require(state_ != nullptr, "FittedModel: not trained");
  nlohmann::ordered_json j;
  j["kind"] = to_string(state_->kind());
  j["dimension"] = state_->dimension();
  j["state"] = state_->to_json();
  return j.dump(2) + "\n";
}

namespace {

void check_train(const Dataset& train) {
  require_config(!train.empty(), "train: empty training set");
}

}  // namespace

FittedModel train_decision_tree(const Dataset& train, const Hyperparams& hp) {
  check_train(train);
  return FittedModel(detail::fit_tree(train, hp.dt));
}

FittedModel train_random_forest(const Dataset& train, const Hyperparams& hp) {
  check_train(train);
  return FittedModel(detail::fit_forest(train, hp.rf, hp.seed));
}

FittedModel train_knn(const Dataset& train, const Hyperparams& hp) {
  check_train(train);
  return FittedModel(detail::fit_knn(train, hp.knn));
}

FittedModel train_svr(const Dataset& train, const Hyperparams& hp) {
  check_train(train);
  return FittedModel(detail::fit_svr(train, hp.svr, nullptr));
}

FittedModel train_model(const Dataset& train, const Hyperparams& hp) {
  switch (hp.kind) {
    case ModelKind::dt: return train_decision_tree(train, hp);
    case ModelKind::rf: return train_random_forest(train, hp);
    case ModelKind::knn: return train_knn(train, hp);
    case ModelKind::svr: return train_svr(train, hp);
  }
  throw std::invalid_argument("train_model: bad ModelKind");
}

FittedModel train_svr_traced(const Dataset& train, const Hyperparams& hp,
                             std::vector<double>* dual_objective_trace) {
  check_train(train);
  return FittedModel(detail::fit_svr(train, hp.svr, dual_objective_trace));
}

std::optional<SvrDualView> svr_dual_view(const FittedModel& model) {
  if (!model.state()) return std::nullopt;
  return detail::svr_view(*model.state());
}

}  // namespace fwmix
