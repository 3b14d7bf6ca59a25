#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fwmix/cross_validation.hpp"
#include "fwmix/metrics.hpp"
#include "fwmix/pipeline_config.hpp"

namespace fwmix {

// Technique column labels: "single:<region_id>" per region, then
// "mixed", "smote", "reweight".
inline constexpr const char* kTechniqueMixed = "mixed";
inline constexpr const char* kTechniqueSmote = "smote";
inline constexpr const char* kTechniqueReweight = "reweight";

struct BenchmarkCell {
  CVResult cv;
  // One model fit on the full technique dataset, scored on the shared
  // holdout. Emitted alongside the fold means so both readings of the
  // grid are on record.
  double holdout_mse = 0.0;
  double train_seconds = 0.0;
};

struct PairSignificance {
  std::string technique_a;
  std::string technique_b;
  TTestResult test;
};

struct BenchmarkReport {
  Protocol protocol = Protocol::in_context;
  std::vector<std::string> model_names;  // row order
  std::vector<std::string> techniques;   // column order
  std::vector<std::string> regions;      // region ids, suite order
  // model -> technique -> cell; complete over model_names x techniques.
  std::map<std::string, std::map<std::string, BenchmarkCell>> cells;
  // model -> region -> reduction vs that model's mixed cell.
  std::map<std::string, std::map<std::string, BiasReduction>> delta_bias;
  // model -> the three technique pairings among mixed/smote/reweight.
  std::map<std::string, std::vector<PairSignificance>> significance;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string config_echo;  // JSON text of the driving config

  const BenchmarkCell& cell(const std::string& model,
                            const std::string& technique) const;
};

// Builds every technique dataset once from the regional suite, then
// cross-validates each model on each with shared fold seeds. Stage
// errors carry their (model, technique) coordinate.
BenchmarkReport run_benchmark(const std::vector<Dataset>& suite,
                              const PipelineConfig& config);

// Report JSON. Timings live under one top-level "timings" key so the
// deterministic remainder can be compared byte-for-byte.
std::string report_to_json_text(const BenchmarkReport& report,
                                bool include_timings = true);
void write_report_json(const BenchmarkReport& report,
                       const std::filesystem::path& path);
BenchmarkReport load_report_json(const std::filesystem::path& path);

// table1_bias_reduction, table2_mse, table3_timing, each as .csv and
// .md with identical cell text.
void emit_tables(const BenchmarkReport& report,
                 const std::filesystem::path& dir);

// Standalone heatmap, rows = models, columns = techniques, fill
// lerped dark-blue(low) to red(high) over the selected cells' range.
void emit_heatmap_svg(const BenchmarkReport& report,
                      const std::filesystem::path& path,
                      const std::vector<std::string>& techniques = {
                          kTechniqueMixed, kTechniqueSmote,
                          kTechniqueReweight});

// Error-bar CSV: one row per cell (mean, 2-SEM bar), then one row per
// technique pair with its interval-overlap flag.
void emit_errorbar_data(const BenchmarkReport& report,
                        const std::filesystem::path& path);

// report.json plus all tables and figure data under dir.
void emit_all(const BenchmarkReport& report, const std::filesystem::path& dir);

// t in [0,1] -> RGB on the heatmap ramp.
std::array<int, 3> heatmap_ramp_color(double t);

bool intervals_overlap(double mean_a, double bar_a, double mean_b,
                       double bar_b);

template <typename F>
double time_stage(const std::string& label, F&& action) {
  (void)label;
  const auto start = std::chrono::steady_clock::now();
  std::forward<F>(action)();
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  return elapsed.count();
}

}  // namespace fwmix
