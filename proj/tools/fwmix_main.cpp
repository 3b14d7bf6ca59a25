#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwmix/augment.hpp"
#include "fwmix/baselines.hpp"
#include "fwmix/benchmark.hpp"
#include "fwmix/common.hpp"
#include "fwmix/csv.hpp"
#include "fwmix/cross_validation.hpp"
#include "fwmix/metrics.hpp"
#include "fwmix/mixing.hpp"
#include "fwmix/models.hpp"
#include "fwmix/pipeline_config.hpp"
#include "fwmix/synthgen.hpp"

namespace fs = std::filesystem;
using namespace fwmix;

namespace {

// The header decides whether a file carries region tags: an exact
// "region" column is treated as the tag column, never as a feature.
std::optional<std::string> detect_region_column(const fs::path& path) {
  std::ifstream in(path);
  require_config(in.good(), "cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::stringstream ss(header);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (cell == "region") return "region";
  return std::nullopt;
}

Dataset load_input(const fs::path& path, const std::string& target) {
  return load_csv(path, target, detect_region_column(path));
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quick = false;
};

PipelineConfig build_config(const CommonOpts& opts) {
  PipelineConfig config = opts.config_path.empty()
                              ? PipelineConfig::defaults()
                              : config_from_json_file(opts.config_path);
  if (opts.seed_given) {
    config.master_seed = opts.seed;
    config.reseed();
  }
  if (opts.quick && !config.quick) config.apply_quick_profile();
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  config.validate();
  return config;
}

void note_written(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

int cmd_generate(const CommonOpts& opts) {
  const PipelineConfig config = build_config(opts);
  const std::vector<Dataset> suite = generate_suite(config.generator);
  fs::create_directories(config.out_dir);
  for (std::size_t r = 0; r < suite.size(); ++r) {
    const std::string& id = config.generator.regions[r].region_id;
    const fs::path csv = config.out_dir / (id + ".csv");
    save_csv(suite[r], csv);
    save_sidecar(suite[r], config.out_dir / (id + ".json"),
                 config.generator.seed.substream(id));
    std::cout << "region " << id << ": " << suite[r].size() << " rows\n";
    note_written(csv);
  }
  return 0;
}

struct AugmentOpts {
  std::string input;
  std::string target = "y";
  int factor = 31;
  double noise_scale = 0.05;
  std::uint64_t seed = 42;
  std::string out_dir;
};

int cmd_augment(const AugmentOpts& opts) {
  const fs::path input(opts.input);
  const Dataset original = load_input(input, opts.target);
  AugmentConfig config;
  config.expansion_factor = opts.factor;
  config.noise_scale = opts.noise_scale;
  config.seed = SeedSpec{opts.seed, "augment"};
  config.validate();
  const Dataset augmented = augment(original, config);
  const KSReport report = fidelity_report(original, augmented);

  const fs::path dir = opts.out_dir.empty() ? input.parent_path() : fs::path(opts.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = input.stem().string();
  const fs::path out_csv = dir / (stem + "_augmented.csv");
  const fs::path out_ks = dir / (stem + "_ks.json");
  save_csv(augmented, out_csv);
  std::ofstream ks(out_ks, std::ios::binary);
  ks << ks_report_to_json(report);
  std::cout << original.size() << " rows -> " << augmented.size() << " rows, max KS D = "
            << format_double(report.overall_max_d) << "\n";
  note_written(out_csv);
  note_written(out_ks);
  return 0;
}

struct MixOpts {
  std::vector<std::string> inputs;
  std::string target = "y";
  std::vector<double> alpha;
  std::string mode = "convex_blend";
  std::string noise_sd = "auto";
  std::uint64_t n = 0;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

int cmd_mix(const MixOpts& opts) {
  std::vector<Dataset> regions;
  for (const std::string& p : opts.inputs) regions.push_back(load_input(p, opts.target));

  MixConfig config;
  config.alpha = opts.alpha;
  if (config.alpha.empty())
    config.alpha.assign(regions.size(), 1.0 / static_cast<double>(regions.size()));
  config.mode = mix_mode_from_string(opts.mode);
  if (opts.noise_sd == "auto") {
    config.mix_noise_sd = -1.0;
  } else {
    try {
      config.mix_noise_sd = std::stod(opts.noise_sd);
    } catch (const std::exception&) {
      throw ConfigError("mix.mix_noise_sd: expected a number or \"auto\"");
    }
    require_config(config.mix_noise_sd >= 0.0, "mix.mix_noise_sd: must be >= 0");
  }
  config.output_n = opts.n;
  config.seed = SeedSpec{opts.seed, "mix"};
  config.validate(regions.size());
  const MixConfig resolved = config.resolved(regions);

  std::vector<std::string> provenance;
  const Dataset mixed = mix(regions, resolved, &provenance);

  fs::create_directories(opts.out_dir);
  const fs::path out_csv = fs::path(opts.out_dir) / "mixed.csv";
  save_csv(mixed, out_csv);

  nlohmann::ordered_json j;
  j["mode"] = to_string(resolved.mode);
  j["alpha"] = resolved.alpha;
  j["mix_noise_sd"] = resolved.mix_noise_sd;
  j["output_n"] = mixed.size();
  if (resolved.mode == MixMode::convex_blend) {
    std::vector<RegionMoments> stats;
    for (const Dataset& region : regions) {
      RegionMoments rm;
      const SummaryStats s = summary_stats(region);
      for (const FeatureStats& f : s.features) {
        rm.mu.push_back(f.mean);
        rm.sigma2.push_back(f.variance.value_or(0.0));
      }
      stats.push_back(std::move(rm));
    }
    const MomentPrediction predicted = predict_moments(stats, resolved);
    const SummaryStats got = summary_stats(mixed);
    std::vector<double> emp_mean, emp_var;
    for (const FeatureStats& f : got.features) {
      emp_mean.push_back(f.mean);
      emp_var.push_back(f.variance.value_or(0.0));
    }
    j["predicted"] = {{"mean", predicted.mean}, {"variance", predicted.variance}};
    j["empirical"] = {{"mean", emp_mean}, {"variance", emp_var}};
  }
  std::map<std::string, std::size_t> prov_counts;
  for (const std::string& tag : provenance) ++prov_counts[tag];
  j["provenance_counts"] = prov_counts;

  const fs::path out_json = fs::path(opts.out_dir) / "mix_report.json";
  std::ofstream rep(out_json, std::ios::binary);
  rep << j.dump(2) << "\n";
  std::cout << "mixed " << regions.size() << " regions into " << mixed.size() << " rows\n";
  note_written(out_csv);
  note_written(out_json);
  return 0;
}

struct BaselineOpts {
  std::string technique;
  std::vector<std::string> inputs;
  std::string target = "y";
  int k_neighbors = 5;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

int cmd_baseline(const BaselineOpts& opts) {
  std::vector<Dataset> regions;
  for (const std::string& p : opts.inputs) regions.push_back(load_input(p, opts.target));
  fs::create_directories(opts.out_dir);

  if (opts.technique == "smote") {
    SmoteConfig config;
    config.k_neighbors = opts.k_neighbors;
    config.seed = SeedSpec{opts.seed, "smote"};
    std::vector<SmoteProvenance> provenance;
    const Dataset balanced = smote_balance(regions, config, &provenance);
    const fs::path out_csv = fs::path(opts.out_dir) / "smote.csv";
    save_csv(balanced, out_csv);
    auto arr = nlohmann::ordered_json::array();
    for (const SmoteProvenance& p : provenance) {
      arr.push_back({{"region", p.region},
                     {"base_index", p.base_index},
                     {"neighbor_index", p.neighbor_index},
                     {"lambda", p.lambda}});
    }
    const fs::path out_json = fs::path(opts.out_dir) / "smote_provenance.json";
    std::ofstream prov(out_json, std::ios::binary);
    prov << arr.dump(2) << "\n";
    std::cout << "balanced to " << balanced.size() << " rows (" << provenance.size()
              << " synthetic)\n";
    note_written(out_csv);
    note_written(out_json);
    return 0;
  }
  if (opts.technique == "reweight") {
    ReweightConfig config;
    config.seed = SeedSpec{opts.seed, "reweight"};
    const Dataset resampled = reweight_resample(regions, config);
    const fs::path out_csv = fs::path(opts.out_dir) / "reweight.csv";
    save_csv(resampled, out_csv);
    std::size_t n_total = 0;
    for (const Dataset& region : regions) n_total += region.size();
    nlohmann::ordered_json weights;
    for (std::size_t r = 0; r < regions.size(); ++r) {
      const auto labels = regions[r].region_labels();
      const std::string id = labels.size() == 1 ? *labels.begin() : "r" + std::to_string(r);
      weights[id] = reweight_weight(n_total, regions.size(), regions[r].size());
    }
    const fs::path out_json = fs::path(opts.out_dir) / "reweight_weights.json";
    std::ofstream wj(out_json, std::ios::binary);
    wj << weights.dump(2) << "\n";
    std::cout << "resampled " << resampled.size() << " rows from " << regions.size()
              << " regions\n";
    note_written(out_csv);
    note_written(out_json);
    return 0;
  }
  throw ConfigError("baseline.technique: expected 'smote' or 'reweight', got '" +
                    opts.technique + "'");
}

struct TrainOpts {
  std::string model;
  std::string input;
  std::string eval;
  std::string target = "y";
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

int cmd_train(const TrainOpts& opts) {
  const Dataset train = load_input(opts.input, opts.target);
  const ModelKind kind = model_kind_from_string(opts.model);
  const Hyperparams hp = Hyperparams::of(kind, SeedSpec{opts.seed, "train"});
  const FittedModel model = train_model(train, hp);
  if (model.convergence_warning())
    std::cerr << "note: solver stopped at its pass budget before reaching tolerance\n";

  fs::create_directories(opts.out_dir);
  const fs::path out_json = fs::path(opts.out_dir) / ("model_" + opts.model + ".json");
  std::ofstream mj(out_json, std::ios::binary);
  mj << model.to_json();
  std::cout << "train mse = " << format_double(mse_on(model, train)) << "\n";
  if (!opts.eval.empty()) {
    const Dataset eval = load_input(opts.eval, opts.target);
    std::cout << "eval mse = " << format_double(mse_on(model, eval)) << "\n";
  }
  note_written(out_json);
  return 0;
}

struct BenchmarkOpts {
  CommonOpts common;
  int threads = 0;
  std::string protocol;
  bool leak_safe = false;
  bool standardize = false;
};

int cmd_benchmark(const BenchmarkOpts& opts) {
  PipelineConfig config = build_config(opts.common);
  if (!opts.protocol.empty()) config.evaluation.protocol = protocol_from_string(opts.protocol);
  if (opts.leak_safe) config.leak_safe = true;
  if (opts.standardize) config.standardize_all = true;
  set_worker_count(opts.threads);

  const double total_seconds = time_stage("benchmark", [&] {
    std::vector<Dataset> suite = generate_suite(config.generator);
    if (!config.leak_safe) {
      for (std::size_t r = 0; r < suite.size(); ++r) {
        AugmentConfig aug = config.augment;
        aug.seed = config.augment.seed.substream(config.generator.regions[r].region_id);
        suite[r] = augment(suite[r], aug);
      }
    }
    const BenchmarkReport report = run_benchmark(suite, config);

    // Stage into a scratch directory, then move files in place so a
    // failed run never leaves a half-written output directory.
    const fs::path staging = config.out_dir.string() + ".partial";
    fs::remove_all(staging);
    try {
      emit_all(report, staging);
      fs::create_directories(config.out_dir);
      for (const auto& entry : fs::directory_iterator(staging)) {
        const fs::path dest = config.out_dir / entry.path().filename();
        fs::remove(dest);
        fs::rename(entry.path(), dest);
        note_written(dest);
      }
      fs::remove_all(staging);
    } catch (...) {
      fs::remove_all(staging);
      throw;
    }

    for (const std::string& model : report.model_names) {
      double best_single = std::numeric_limits<double>::infinity();
      for (const std::string& region : report.regions)
        best_single = std::min(best_single,
                               report.cell(model, "single:" + region).cv.mean_mse);
      std::cout << model << ": mixed mse " << format_double(
                       report.cell(model, kTechniqueMixed).cv.mean_mse)
                << ", best single " << format_double(best_single) << "\n";
    }
  });
  std::cout << "benchmark finished in " << format_double(total_seconds) << " s\n";
  return 0;
}

struct ReportOpts {
  std::string input;
  std::string out_dir;
};

int cmd_report(const ReportOpts& opts) {
  const BenchmarkReport report = load_report_json(opts.input);
  const fs::path dir = opts.out_dir.empty() ? fs::path(opts.input).parent_path()
                                            : fs::path(opts.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  emit_tables(report, dir);
  emit_heatmap_svg(report, dir / "fig2_heatmap.svg");
  emit_errorbar_data(report, dir / "fig3_errorbars.csv");
  for (const char* name :
       {"table1_bias_reduction.csv", "table1_bias_reduction.md", "table2_mse.csv",
        "table2_mse.md", "table3_timing.csv", "table3_timing.md", "fig2_heatmap.svg",
        "fig3_errorbars.csv"})
    note_written(dir / name);
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config JSON");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed")->each([&](const std::string&) {
    opts.seed_given = true;
  });
  cmd->add_flag("--quick", opts.quick, "small smoke-test profile");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-wise dataset mixing toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fwmix 1.0.0");

  CommonOpts generate_opts;
  CLI::App* generate = app.add_subcommand("generate", "write the synthetic regional suite");
  add_common(generate, generate_opts);

  AugmentOpts augment_opts;
  CLI::App* augment_cmd = app.add_subcommand("augment", "replicate with calibrated noise");
  augment_cmd->add_option("--input", augment_opts.input, "input CSV")->required();
  augment_cmd->add_option("--target", augment_opts.target, "target column name");
  augment_cmd->add_option("--factor", augment_opts.factor, "copies per sample");
  augment_cmd->add_option("--noise-scale", augment_opts.noise_scale, "noise sd per feature sd");
  augment_cmd->add_option("--seed", augment_opts.seed, "seed");
  augment_cmd->add_option("--out", augment_opts.out_dir, "output directory");

  MixOpts mix_opts;
  CLI::App* mix_cmd = app.add_subcommand("mix", "blend regional datasets");
  mix_cmd->add_option("--inputs", mix_opts.inputs, "regional CSVs")->required()->expected(-1);
  mix_cmd->add_option("--target", mix_opts.target, "target column name");
  mix_cmd->add_option("--alpha", mix_opts.alpha, "blend weights (default equal)")->expected(-1);
  mix_cmd->add_option("--mode", mix_opts.mode, "convex_blend or pooled");
  mix_cmd->add_option("--noise-sd", mix_opts.noise_sd, "blend noise sd or 'auto'");
  mix_cmd->add_option("--n", mix_opts.n, "output rows (0 = input total)");
  mix_cmd->add_option("--seed", mix_opts.seed, "seed");
  mix_cmd->add_option("--out", mix_opts.out_dir, "output directory");

  BaselineOpts baseline_opts;
  CLI::App* baseline = app.add_subcommand("baseline", "smote or reweight baseline");
  baseline->add_option("--technique", baseline_opts.technique, "smote or reweight")->required();
  baseline->add_option("--inputs", baseline_opts.inputs, "regional CSVs")->required()->expected(-1);
  baseline->add_option("--target", baseline_opts.target, "target column name");
  baseline->add_option("--k", baseline_opts.k_neighbors, "smote neighbours");
  baseline->add_option("--seed", baseline_opts.seed, "seed");
  baseline->add_option("--out", baseline_opts.out_dir, "output directory");

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "fit one regressor on a CSV");
  train->add_option("--model", train_opts.model, "dt, rf, knn, or svr")->required();
  train->add_option("--input", train_opts.input, "training CSV")->required();
  train->add_option("--eval", train_opts.eval, "extra CSV to score");
  train->add_option("--target", train_opts.target, "target column name");
  train->add_option("--seed", train_opts.seed, "seed");
  train->add_option("--out", train_opts.out_dir, "output directory");

  BenchmarkOpts bench_opts;
  CLI::App* bench = app.add_subcommand("benchmark", "full technique-by-model grid");
  add_common(bench, bench_opts.common);
  bench->add_option("--threads", bench_opts.threads, "worker threads (0 = hardware)");
  bench->add_option("--protocol", bench_opts.protocol, "in_context or cross_context");
  bench->add_flag("--leak-safe", bench_opts.leak_safe, "augment inside folds only");
  bench->add_flag("--standardize", bench_opts.standardize, "standardize features per fold");

  ReportOpts report_opts;
  CLI::App* report = app.add_subcommand("report", "re-render tables and figures");
  report->add_option("--input", report_opts.input, "report.json path")->required();
  report->add_option("--out", report_opts.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(generate)) return cmd_generate(generate_opts);
    if (app.got_subcommand(augment_cmd)) return cmd_augment(augment_opts);
    if (app.got_subcommand(mix_cmd)) return cmd_mix(mix_opts);
    if (app.got_subcommand(baseline)) return cmd_baseline(baseline_opts);
    if (app.got_subcommand(train)) return cmd_train(train_opts);
    if (app.got_subcommand(bench)) return cmd_benchmark(bench_opts);
    if (app.got_subcommand(report)) return cmd_report(report_opts);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
