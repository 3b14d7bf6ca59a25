#include "fwmix/pipeline_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fwmix/common.hpp"

namespace fwmix {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Protocol protocol) {
  return protocol == Protocol::in_context ? "in_context" : "cross_context";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "in_context") return Protocol::in_context;
  if (s == "cross_context") return Protocol::cross_context;
  throw ConfigError("evaluation.protocol: unknown protocol '" + s + "'");
}

namespace {

void check_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
  require_config(j.is_object(), path + ": expected an object");
  for (const auto& [key, value] : j.items())
    require_config(allowed.count(key) > 0, path + ": unknown key '" + key + "'");
}

double get_double(const json& j, const std::string& path) {
  require_config(j.is_number(), path + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  require_config(j.is_number_integer(), path + ": expected an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  require_config(j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0),
                 path + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
  require_config(j.is_boolean(), path + ": expected a boolean");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  require_config(j.is_string(), path + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> get_double_vec(const json& j, const std::string& path) {
  require_config(j.is_array(), path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(get_double(v, path));
  return out;
}

void parse_generator(const json& j, GeneratorConfig& out) {
  check_keys(j, "generator", {"theta", "target_noise_sd", "regions"});
  if (j.contains("theta")) out.theta = get_double_vec(j["theta"], "generator.theta");
  if (j.contains("target_noise_sd"))
    out.target_noise_sd = get_double(j["target_noise_sd"], "generator.target_noise_sd");
  if (j.contains("regions")) {
    require_config(j["regions"].is_array(), "generator.regions: expected an array");
    out.regions.clear();
    std::size_t idx = 0;
    for (const auto& rj : j["regions"]) {
      const std::string path = "generator.regions[" + std::to_string(idx++) + "]";
      check_keys(rj, path, {"region_id", "n", "mu", "sigma2", "bias_offset"});
      RegionSpec spec;
      require_config(rj.contains("region_id"), path + ": missing region_id");
      spec.region_id = get_string(rj["region_id"], path + ".region_id");
      require_config(rj.contains("n"), path + ": missing n");
      spec.n = get_u64(rj["n"], path + ".n");
      require_config(rj.contains("mu"), path + ": missing mu");
      spec.mu = get_double_vec(rj["mu"], path + ".mu");
      require_config(rj.contains("sigma2"), path + ": missing sigma2");
      spec.sigma2 = get_double_vec(rj["sigma2"], path + ".sigma2");
      if (rj.contains("bias_offset"))
        spec.bias_offset = get_double(rj["bias_offset"], path + ".bias_offset");
      out.regions.push_back(std::move(spec));
    }
  }
}

void parse_augment(const json& j, AugmentConfig& out) {
  check_keys(j, "augment",
             {"expansion_factor", "noise_scale", "noise_target", "target_noise_scale"});
  if (j.contains("expansion_factor"))
    out.expansion_factor = get_int(j["expansion_factor"], "augment.expansion_factor");
  if (j.contains("noise_scale"))
    out.noise_scale = get_double(j["noise_scale"], "augment.noise_scale");
  if (j.contains("noise_target"))
    out.noise_target = get_bool(j["noise_target"], "augment.noise_target");
  if (j.contains("target_noise_scale"))
    out.target_noise_scale = get_double(j["target_noise_scale"], "augment.target_noise_scale");
}

void parse_mix(const json& j, MixConfig& out) {
  check_keys(j, "mix", {"alpha", "mix_noise_sd", "mode", "output_n"});
  if (j.contains("alpha")) out.alpha = get_double_vec(j["alpha"], "mix.alpha");
  if (j.contains("mix_noise_sd")) {
    const auto& v = j["mix_noise_sd"];
    if (v.is_string()) {
      require_config(v.get<std::string>() == "auto",
                     "mix.mix_noise_sd: expected a number or \"auto\"");
      out.mix_noise_sd = -1.0;
    } else {
      out.mix_noise_sd = get_double(v, "mix.mix_noise_sd");
      require_config(out.mix_noise_sd >= 0.0, "mix.mix_noise_sd: must be >= 0");
    }
  }
  if (j.contains("mode")) out.mode = mix_mode_from_string(get_string(j["mode"], "mix.mode"));
  if (j.contains("output_n")) out.output_n = get_u64(j["output_n"], "mix.output_n");
}

void parse_dt_fields(const json& j, const std::string& path, DtParams& out) {
  if (j.contains("max_depth")) {
    if (j["max_depth"].is_null())
      out.max_depth.reset();
    else
      out.max_depth = get_int(j["max_depth"], path + ".max_depth");
  }
  if (j.contains("min_samples_split"))
    out.min_samples_split = get_int(j["min_samples_split"], path + ".min_samples_split");
  if (j.contains("min_samples_leaf"))
    out.min_samples_leaf = get_int(j["min_samples_leaf"], path + ".min_samples_leaf");
}

Hyperparams parse_model(const json& j, const std::string& path) {
  require_config(j.is_object(), path + ": expected an object");
  require_config(j.contains("kind"), path + ": missing kind");
  const ModelKind kind = model_kind_from_string(get_string(j["kind"], path + ".kind"));
  Hyperparams hp = Hyperparams::of(kind);
  switch (kind) {
    case ModelKind::dt:
      check_keys(j, path, {"kind", "max_depth", "min_samples_split", "min_samples_leaf"});
      parse_dt_fields(j, path, hp.dt);
      break;
    case ModelKind::rf:
      check_keys(j, path, {"kind", "n_trees", "bootstrap", "max_depth", "min_samples_split",
                           "min_samples_leaf"});
      if (j.contains("n_trees")) hp.rf.n_trees = get_int(j["n_trees"], path + ".n_trees");
      if (j.contains("bootstrap")) hp.rf.bootstrap = get_bool(j["bootstrap"], path + ".bootstrap");
      parse_dt_fields(j, path, hp.rf.tree);
      break;
    case ModelKind::knn:
      check_keys(j, path, {"kind", "k"});
      if (j.contains("k")) hp.knn.k = get_int(j["k"], path + ".k");
      break;
    case ModelKind::svr:
      check_keys(j, path, {"kind", "c", "epsilon", "gamma", "kkt_tol", "max_passes"});
      if (j.contains("c")) hp.svr.c = get_double(j["c"], path + ".c");
      if (j.contains("epsilon")) hp.svr.epsilon = get_double(j["epsilon"], path + ".epsilon");
      if (j.contains("gamma")) {
        const auto& g = j["gamma"];
        if (g.is_string()) {
          require_config(g.get<std::string>() == "scale",
                         path + ".gamma: expected a number or \"scale\"");
          hp.svr.gamma = 0.0;
        } else {
          hp.svr.gamma = get_double(g, path + ".gamma");
        }
      }
      if (j.contains("kkt_tol")) hp.svr.kkt_tol = get_double(j["kkt_tol"], path + ".kkt_tol");
      if (j.contains("max_passes"))
        hp.svr.max_passes = get_int(j["max_passes"], path + ".max_passes");
      break;
  }
  return hp;
}

void parse_evaluation(const json& j, EvaluationConfig& out) {
  check_keys(j, "evaluation", {"k", "test_fraction", "protocol"});
  if (j.contains("k")) out.k = get_int(j["k"], "evaluation.k");
  if (j.contains("test_fraction"))
    out.test_fraction = get_double(j["test_fraction"], "evaluation.test_fraction");
  if (j.contains("protocol"))
    out.protocol = protocol_from_string(get_string(j["protocol"], "evaluation.protocol"));
}

ordered_json model_to_json(const Hyperparams& hp) {
  ordered_json j;
  j["kind"] = to_string(hp.kind);
  switch (hp.kind) {
    case ModelKind::dt:
      if (hp.dt.max_depth)
        j["max_depth"] = *hp.dt.max_depth;
      else
        j["max_depth"] = nullptr;
      j["min_samples_split"] = hp.dt.min_samples_split;
      j["min_samples_leaf"] = hp.dt.min_samples_leaf;
      break;
    case ModelKind::rf:
      j["n_trees"] = hp.rf.n_trees;
      j["bootstrap"] = hp.rf.bootstrap;
      if (hp.rf.tree.max_depth)
        j["max_depth"] = *hp.rf.tree.max_depth;
      else
        j["max_depth"] = nullptr;
      j["min_samples_split"] = hp.rf.tree.min_samples_split;
      j["min_samples_leaf"] = hp.rf.tree.min_samples_leaf;
      break;
    case ModelKind::knn:
      j["k"] = hp.knn.k;
      break;
    case ModelKind::svr:
      j["c"] = hp.svr.c;
      j["epsilon"] = hp.svr.epsilon;
      if (hp.svr.gamma > 0.0)
        j["gamma"] = hp.svr.gamma;
      else
        j["gamma"] = "scale";
      j["kkt_tol"] = hp.svr.kkt_tol;
      j["max_passes"] = hp.svr.max_passes;
      break;
  }
  return j;
}

}  // namespace

PipelineConfig PipelineConfig::defaults(std::uint64_t master_seed) {
  PipelineConfig config;
  config.master_seed = master_seed;
  config.generator = default_suite_config(master_seed, 765);
  config.mix.alpha = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  config.models = {Hyperparams::of(ModelKind::dt), Hyperparams::of(ModelKind::rf),
                   Hyperparams::of(ModelKind::svr), Hyperparams::of(ModelKind::knn)};
  config.reseed();
  return config;
}

void PipelineConfig::apply_quick_profile() {
  quick = true;
  for (RegionSpec& region : generator.regions) region.n = 125;
  augment.expansion_factor = 4;
  for (Hyperparams& hp : models)
    if (hp.kind == ModelKind::rf) hp.rf.n_trees = 50;
}

void PipelineConfig::reseed() {
  generator.seed = SeedSpec{master_seed, "generate"};
  augment.seed = SeedSpec{master_seed, "augment"};
  mix.seed = SeedSpec{master_seed, "mix"};
  smote.seed = SeedSpec{master_seed, "smote"};
  reweight.seed = SeedSpec{master_seed, "reweight"};
  const SeedSpec train{master_seed, "train"};
  for (std::size_t i = 0; i < models.size(); ++i)
    models[i].seed = train.substream("model", i);
}

void PipelineConfig::validate() const {
  generator.validate();
  augment.validate();
  mix.validate(generator.regions.size());
  require_config(smote.k_neighbors >= 1, "smote.k_neighbors: must be >= 1");
  require_config(!models.empty(), "models: at least one model required");
  require_config(evaluation.k >= 2, "evaluation.k: must be >= 2");
  require_config(evaluation.test_fraction > 0.0 && evaluation.test_fraction < 1.0,
                 "evaluation.test_fraction: must be in (0, 1)");
  require_config(!out_dir.empty(), "out_dir: must not be empty");
}

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"master_seed", "quick", "leak_safe", "standardize_all", "out_dir", "generator",
              "augment", "mix", "smote", "models", "evaluation"});

  std::uint64_t master_seed = 42;
  if (j.contains("master_seed")) master_seed = get_u64(j["master_seed"], "master_seed");
  PipelineConfig config = PipelineConfig::defaults(master_seed);

  if (j.contains("generator")) parse_generator(j["generator"], config.generator);
  if (j.contains("augment")) parse_augment(j["augment"], config.augment);
  if (j.contains("mix")) parse_mix(j["mix"], config.mix);
  if (j.contains("smote")) {
    check_keys(j["smote"], "smote", {"k_neighbors"});
    if (j["smote"].contains("k_neighbors"))
      config.smote.k_neighbors = get_int(j["smote"]["k_neighbors"], "smote.k_neighbors");
  }
  if (j.contains("models")) {
    require_config(j["models"].is_array(), "models: expected an array");
    config.models.clear();
    std::size_t idx = 0;
    for (const auto& mj : j["models"])
      config.models.push_back(parse_model(mj, "models[" + std::to_string(idx++) + "]"));
  }
  if (j.contains("evaluation")) parse_evaluation(j["evaluation"], config.evaluation);
  if (j.contains("out_dir")) config.out_dir = get_string(j["out_dir"], "out_dir");
  if (j.contains("leak_safe")) config.leak_safe = get_bool(j["leak_safe"], "leak_safe");
  if (j.contains("standardize_all"))
    config.standardize_all = get_bool(j["standardize_all"], "standardize_all");
  if (j.contains("quick") && get_bool(j["quick"], "quick")) config.apply_quick_profile();

  config.reseed();
  config.validate();
  return config;
}

PipelineConfig config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require_config(in.good(), "config: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

std::string config_to_json_text(const PipelineConfig& config) {
  ordered_json j;
  j["master_seed"] = config.master_seed;
  j["quick"] = config.quick;
  j["leak_safe"] = config.leak_safe;
  j["standardize_all"] = config.standardize_all;
  j["out_dir"] = config.out_dir.string();

  ordered_json gen;
  gen["theta"] = config.generator.theta;
  gen["target_noise_sd"] = config.generator.target_noise_sd;
  auto regions = ordered_json::array();
  for (const RegionSpec& spec : config.generator.regions) {
    ordered_json rj;
    rj["region_id"] = spec.region_id;
    rj["n"] = spec.n;
    rj["mu"] = spec.mu;
    rj["sigma2"] = spec.sigma2;
    rj["bias_offset"] = spec.bias_offset;
    regions.push_back(std::move(rj));
  }
  gen["regions"] = std::move(regions);
  j["generator"] = std::move(gen);

  ordered_json aug;
  aug["expansion_factor"] = config.augment.expansion_factor;
  aug["noise_scale"] = config.augment.noise_scale;
  aug["noise_target"] = config.augment.noise_target;
  aug["target_noise_scale"] = config.augment.target_noise_scale;
  j["augment"] = std::move(aug);

  ordered_json mix;
  mix["alpha"] = config.mix.alpha;
  if (config.mix.mix_noise_sd < 0.0)
    mix["mix_noise_sd"] = "auto";
  else
    mix["mix_noise_sd"] = config.mix.mix_noise_sd;
  mix["mode"] = to_string(config.mix.mode);
  mix["output_n"] = config.mix.output_n;
  j["mix"] = std::move(mix);

  j["smote"] = ordered_json{{"k_neighbors", config.smote.k_neighbors}};

  auto models = ordered_json::array();
  for (const Hyperparams& hp : config.models) models.push_back(model_to_json(hp));
  j["models"] = std::move(models);

  ordered_json eval;
  eval["k"] = config.evaluation.k;
  eval["test_fraction"] = config.evaluation.test_fraction;
  eval["protocol"] = to_string(config.evaluation.protocol);
  j["evaluation"] = std::move(eval);

  return j.dump(2) + "\n";
}

}  // namespace fwmix
