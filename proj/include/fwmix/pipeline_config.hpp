#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fwmix/augment.hpp"
#include "fwmix/baselines.hpp"
#include "fwmix/mixing.hpp"
#include "fwmix/models.hpp"
#include "fwmix/synthgen.hpp"

namespace fwmix {

// How benchmark cells are scored. in_context cross-validates each
// technique's dataset on itself; cross_context scores every fold-trained
// model on one shared holdout pooled from the regional suite.
enum class Protocol { in_context, cross_context };

std::string to_string(Protocol protocol);
Protocol protocol_from_string(const std::string& s);

struct EvaluationConfig {
  int k = 10;
  double test_fraction = 0.2;
  Protocol protocol = Protocol::in_context;
};

// One JSON document with a section per stage. All stage seeds derive
// from master_seed through fixed labels, so the document never stores
// raw seed material besides the one integer.
struct PipelineConfig {
  GeneratorConfig generator;
  AugmentConfig augment;
  MixConfig mix;
  SmoteConfig smote;
  ReweightConfig reweight;
  std::vector<Hyperparams> models;
  EvaluationConfig evaluation;
  std::filesystem::path out_dir = "out";
  std::uint64_t master_seed = 42;
  bool leak_safe = false;       // rebuild fold-local datasets inside CV
  bool standardize_all = false; // standardize features for every model
  bool quick = false;

  static PipelineConfig defaults(std::uint64_t master_seed = 42);

  // Smoke-test profile: smaller regions, fewer trees. Keeps k and the
  // model list intact.
  void apply_quick_profile();

  // Re-derives every stage SeedSpec from master_seed. Called after any
  // seed override.
  void reseed();

  void validate() const;  // ConfigError names the offending field
};

PipelineConfig config_from_json_text(const std::string& text);
PipelineConfig config_from_json_file(const std::filesystem::path& path);
std::string config_to_json_text(const PipelineConfig& config);

}  // namespace fwmix
