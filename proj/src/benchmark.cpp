#include "fwmix/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "fwmix/common.hpp"

namespace fwmix {

using nlohmann::ordered_json;

namespace {

std::string suite_region_id(const Dataset& dataset, std::size_t index) {
  const auto labels = dataset.region_labels();
  require_config(labels.size() == 1, "benchmark: suite dataset " + std::to_string(index) +
                                         " must carry exactly one region tag");
  return *labels.begin();
}

// Feature-wise affine map fitted on one dataset, applied to others.
struct Standardizer {
  std::vector<double> mean, sd;

  static Standardizer fit(const Dataset& data) {
    Standardizer s;
    s.mean.resize(data.dim());
    s.sd.resize(data.dim());
    for (std::size_t j = 0; j < data.dim(); ++j) {
      const auto col = data.feature_column(j);
      s.mean[j] = mean_of(col);
      const double sd = col.size() >= 2 ? sample_sd(col) : 0.0;
      s.sd[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  Dataset apply(const Dataset& data) const {
    Dataset out(data.feature_names(), data.target_name());
    out.reserve(data.size());
    std::vector<double> x(data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = data.features(i);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = (row[j] - mean[j]) / sd[j];
      if (data.has_regions())
        out.append(x, data.target(i), data.region(i));
      else
        out.append(x, data.target(i));
    }
    return out;
  }
};

int resolved_threads() {
  const int configured = worker_count();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open '" + path.string() + "' for writing");
  out << text;
  require(out.good(), "failed writing '" + path.string() + "'");
}

// One table rendered to CSV and Markdown with identical cell text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c)
      out += (c ? "," : "") + header[c];
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
      out += "\n";
    }
    return out;
  }

  std::string markdown() const {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t c = 0; c < header.size(); ++c) out += " --- |";
    out += "\n";
    for (const auto& row : rows) {
      out += "|";
      for (const auto& cell : row) out += " " + cell + " |";
      out += "\n";
    }
    return out;
  }

  void write(const std::filesystem::path& dir, const std::string& stem) const {
    write_text(dir / (stem + ".csv"), csv());
    write_text(dir / (stem + ".md"), markdown());
  }
};

}  // namespace

const BenchmarkCell& BenchmarkReport::cell(const std::string& model,
                                           const std::string& technique) const {
  const auto mi = cells.find(model);
  require(mi != cells.end(), "report: no model '" + model + "'");
  const auto ti = mi->second.find(technique);
  require(ti != mi->second.end(), "report: no technique '" + technique + "'");
  return ti->second;
}

BenchmarkReport run_benchmark(const std::vector<Dataset>& suite, const PipelineConfig& config) {
  config.validate();
  require_config(suite.size() >= 2, "benchmark: needs at least 2 regional datasets");
  const std::size_t n_regions = suite.size();

  BenchmarkReport report;
  report.protocol = config.evaluation.protocol;
  report.master_seed = config.master_seed;
  report.threads = resolved_threads();
  report.config_echo = config_to_json_text(config);

  std::set<std::string> seen_ids;
  for (std::size_t r = 0; r < n_regions; ++r) {
    const std::string id = suite_region_id(suite[r], r);
    require_config(seen_ids.insert(id).second,
                   "benchmark: duplicate region id '" + id + "' in the suite");
    report.regions.push_back(id);
  }

  for (const Hyperparams& hp : config.models) {
    const std::string name = to_string(hp.kind);
    require_config(std::find(report.model_names.begin(), report.model_names.end(), name) ==
                       report.model_names.end(),
                   "benchmark: duplicate model kind '" + name + "'");
    report.model_names.push_back(name);
  }

  const SeedSpec root{config.master_seed, "bench"};

  // Shared holdout: one slice per region, carved off before any technique
  // dataset is built so no technique ever trains on holdout rows.
  std::vector<Dataset> region_train;
  Dataset holdout(suite[0].feature_names(), suite[0].target_name());
  for (std::size_t r = 0; r < n_regions; ++r) {
    HoldoutSplit split =
        split_holdout(suite[r], config.evaluation.test_fraction, root.substream("holdout", r));
    region_train.push_back(std::move(split.train));
    for (std::size_t i = 0; i < split.test.size(); ++i) holdout.append_row(split.test, i);
  }

  std::map<std::string, Dataset> technique_data;
  for (std::size_t r = 0; r < n_regions; ++r)
    technique_data.emplace("single:" + report.regions[r], region_train[r]);
  {
    MixConfig mix_cfg = config.mix.resolved(region_train);
    technique_data.emplace(kTechniqueMixed, mix(region_train, mix_cfg));
    technique_data.emplace(kTechniqueSmote, smote_balance(region_train, config.smote));
    technique_data.emplace(kTechniqueReweight, reweight_resample(region_train, config.reweight));
  }
  for (const std::string& id : report.regions) report.techniques.push_back("single:" + id);
  report.techniques.push_back(kTechniqueMixed);
  report.techniques.push_back(kTechniqueSmote);
  report.techniques.push_back(kTechniqueReweight);

  for (const std::string& model : report.model_names)
    for (const std::string& tech : report.techniques) report.cells[model][tech] = {};

  const Dataset* shared_holdout =
      config.evaluation.protocol == Protocol::cross_context ? &holdout : nullptr;

  const std::size_t n_cells = report.model_names.size() * report.techniques.size();
  std::exception_ptr first_error;
  std::mutex error_mutex;
  parallel_for(n_cells, [&](std::size_t index) {
    const std::string& model = report.model_names[index / report.techniques.size()];
    const std::string& tech = report.techniques[index % report.techniques.size()];
    try {
      const Hyperparams& base_hp = config.models[index / report.techniques.size()];
      const Dataset& data = technique_data.at(tech);
      BenchmarkCell& cell = report.cells[model][tech];

      FoldPrep prep;
      if (config.leak_safe || config.standardize_all) {
        const bool leak_safe = config.leak_safe;
        const bool standardize = config.standardize_all;
        AugmentConfig aug = config.augment;
        const SeedSpec aug_root = root.substream("fold-augment").substream(tech);
        prep = [leak_safe, standardize, aug, aug_root](Dataset train, Dataset eval,
                                                       int fold) {
          if (leak_safe) {
            AugmentConfig fold_aug = aug;
            fold_aug.seed = aug_root.substream("fold", static_cast<std::size_t>(fold));
            train = augment(train, fold_aug);
          }
          if (standardize) {
            const Standardizer s = Standardizer::fit(train);
            train = s.apply(train);
            eval = s.apply(eval);
          }
          return std::make_pair(std::move(train), std::move(eval));
        };
      }

      cell.train_seconds = time_stage(model + "/" + tech, [&] {
        const SeedSpec cv_seed = root.substream("cv").substream(model);
        cell.cv = cross_validate(data, base_hp, config.evaluation.k, cv_seed, prep,
                                 shared_holdout);
        Hyperparams full_hp = base_hp;
        full_hp.seed = root.substream("full").substream(model).substream(tech);
        Dataset train = data;
        Dataset eval = holdout;
        if (config.standardize_all) {
          const Standardizer s = Standardizer::fit(train);
          train = s.apply(train);
          eval = s.apply(eval);
        }
        const FittedModel full = train_model(train, full_hp);
        cell.holdout_mse = mse_on(full, eval);
      });
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) {
        try {
          throw;
        } catch (const ConfigError& e) {
          first_error = std::make_exception_ptr(
              ConfigError("benchmark cell (" + model + ", " + tech + "): " + e.what()));
        } catch (const std::exception& e) {
          first_error = std::make_exception_ptr(std::runtime_error(
              "benchmark cell (" + model + ", " + tech + "): " + e.what()));
        }
      }
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  for (const std::string& model : report.model_names) {
    const BenchmarkCell& mixed = report.cell(model, kTechniqueMixed);
    for (const std::string& region : report.regions) {
      const BenchmarkCell& single = report.cell(model, "single:" + region);
      report.delta_bias[model][region] = delta_bias(single.cv.mean_mse, mixed.cv.mean_mse);
    }
    const auto pair_test = [&](const char* a, const char* b) {
      const CVResult& ca = report.cell(model, a).cv;
      const CVResult& cb = report.cell(model, b).cv;
      report.significance[model].push_back(
          {a, b, paired_t_test(ca.fold_mses, cb.fold_mses)});
    };
    pair_test(kTechniqueMixed, kTechniqueSmote);
    pair_test(kTechniqueMixed, kTechniqueReweight);
    pair_test(kTechniqueSmote, kTechniqueReweight);
  }
  return report;
}

std::string report_to_json_text(const BenchmarkReport& report, bool include_timings) {
  ordered_json j;
  j["protocol"] = to_string(report.protocol);
  j["master_seed"] = report.master_seed;
  j["models"] = report.model_names;
  j["techniques"] = report.techniques;
  j["regions"] = report.regions;

  ordered_json cells;
  for (const std::string& model : report.model_names) {
    ordered_json row;
    for (const std::string& tech : report.techniques) {
      const BenchmarkCell& cell = report.cell(model, tech);
      ordered_json cj;
      cj["mean_mse"] = cell.cv.mean_mse;
      cj["sem"] = cell.cv.sem;
      cj["error_bar"] = cell.cv.error_bar;
      cj["k"] = cell.cv.k;
      cj["fold_mses"] = cell.cv.fold_mses;
      cj["holdout_mse"] = cell.holdout_mse;
      row[tech] = std::move(cj);
    }
    cells[model] = std::move(row);
  }
  j["cells"] = std::move(cells);

  ordered_json bias;
  for (const std::string& model : report.model_names) {
    if (!report.delta_bias.count(model)) continue;
    ordered_json row;
    for (const std::string& region : report.regions) {
      const BiasReduction& d = report.delta_bias.at(model).at(region);
      row[region] = ordered_json{{"mse_regional", d.mse_regional},
                                 {"mse_mixed", d.mse_mixed},
                                 {"delta_percent", d.delta_percent}};
    }
    bias[model] = std::move(row);
  }
  j["delta_bias"] = std::move(bias);

  ordered_json sig;
  for (const std::string& model : report.model_names) {
    if (!report.significance.count(model)) continue;
    auto arr = ordered_json::array();
    for (const PairSignificance& pair : report.significance.at(model)) {
      arr.push_back(ordered_json{{"technique_a", pair.technique_a},
                                 {"technique_b", pair.technique_b},
                                 {"t", pair.test.t},
                                 {"df", pair.test.df},
                                 {"p", pair.test.p}});
    }
    sig[model] = std::move(arr);
  }
  j["significance"] = std::move(sig);

  if (!report.config_echo.empty())
    j["config"] = ordered_json::parse(report.config_echo);

  if (include_timings) {
    ordered_json timings;
    timings["threads"] = report.threads;
    ordered_json per_cell;
    for (const std::string& model : report.model_names) {
      ordered_json row;
      for (const std::string& tech : report.techniques)
        row[tech] = report.cell(model, tech).train_seconds;
      per_cell[model] = std::move(row);
    }
    timings["cells"] = std::move(per_cell);
    j["timings"] = std::move(timings);
  }
  return j.dump(2) + "\n";
}

void write_report_json(const BenchmarkReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json_text(report, true));
}

BenchmarkReport load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require_config(in.good(), "report: cannot open '" + path.string() + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("report: invalid JSON in '" + path.string() + "': " + e.what());
  }
  try {
    BenchmarkReport report;
    report.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.model_names = j.at("models").get<std::vector<std::string>>();
    report.techniques = j.at("techniques").get<std::vector<std::string>>();
    report.regions = j.at("regions").get<std::vector<std::string>>();
    for (const std::string& model : report.model_names) {
      for (const std::string& tech : report.techniques) {
        const auto& cj = j.at("cells").at(model).at(tech);
        BenchmarkCell cell;
        cell.cv.mean_mse = cj.at("mean_mse").get<double>();
        cell.cv.sem = cj.at("sem").get<double>();
        cell.cv.error_bar = cj.at("error_bar").get<double>();
        cell.cv.k = cj.at("k").get<int>();
        cell.cv.fold_mses = cj.at("fold_mses").get<std::vector<double>>();
        cell.holdout_mse = cj.at("holdout_mse").get<double>();
        report.cells[model][tech] = std::move(cell);
      }
      if (j.at("delta_bias").contains(model)) {
        for (const std::string& region : report.regions) {
          const auto& dj = j.at("delta_bias").at(model).at(region);
          report.delta_bias[model][region] = {dj.at("mse_regional").get<double>(),
                                              dj.at("mse_mixed").get<double>(),
                                              dj.at("delta_percent").get<double>()};
        }
      }
      if (j.at("significance").contains(model)) {
        for (const auto& pj : j.at("significance").at(model)) {
          PairSignificance pair;
          pair.technique_a = pj.at("technique_a").get<std::string>();
          pair.technique_b = pj.at("technique_b").get<std::string>();
          pair.test.t = pj.at("t").get<double>();
          pair.test.df = pj.at("df").get<int>();
          pair.test.p = pj.at("p").get<double>();
          report.significance[model].push_back(std::move(pair));
        }
      }
    }
    if (j.contains("config")) report.config_echo = j.at("config").dump(2) + "\n";
    if (j.contains("timings")) {
      report.threads = j.at("timings").at("threads").get<int>();
      for (const std::string& model : report.model_names)
        for (const std::string& tech : report.techniques)
          report.cells[model][tech].train_seconds =
              j.at("timings").at("cells").at(model).at(tech).get<double>();
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report: malformed '" + path.string() + "': " + e.what());
  }
}

void emit_tables(const BenchmarkReport& report, const std::filesystem::path& dir) {
  Table t1;
  t1.header.push_back("model");
  for (const std::string& region : report.regions) t1.header.push_back(region);
  t1.header.push_back("average");
  for (const std::string& model : report.model_names) {
    std::vector<std::string> row{model};
    KahanSum sum;
    for (const std::string& region : report.regions) {
      const double d = report.delta_bias.at(model).at(region).delta_percent;
      sum.add(d);
      row.push_back(fmt(d));
    }
    row.push_back(fmt(sum.value() / static_cast<double>(report.regions.size())));
    t1.rows.push_back(std::move(row));
  }
  t1.write(dir, "table1_bias_reduction");

  Table t2;
  t2.header.push_back("model");
  for (const std::string& tech : report.techniques) t2.header.push_back(tech);
  for (const std::string& model : report.model_names) {
    std::vector<std::string> row{model};
    for (const std::string& tech : report.techniques)
      row.push_back(fmt(report.cell(model, tech).cv.mean_mse));
    t2.rows.push_back(std::move(row));
  }
  t2.write(dir, "table2_mse");

  Table t3;
  t3.header = {"model", "mixed_seconds", "reweight_seconds"};
  for (const std::string& model : report.model_names) {
    t3.rows.push_back({model, fmt(report.cell(model, kTechniqueMixed).train_seconds),
                       fmt(report.cell(model, kTechniqueReweight).train_seconds)});
  }
  t3.write(dir, "table3_timing");
}

std::array<int, 3> heatmap_ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  constexpr std::array<int, 3> low{8, 48, 107};    // dark blue
  constexpr std::array<int, 3> high{215, 48, 39};  // red
  std::array<int, 3> out{};
  for (std::size_t c = 0; c < 3; ++c)
    out[c] = static_cast<int>(std::lround(low[c] + t * (high[c] - low[c])));
  return out;
}

bool intervals_overlap(double mean_a, double bar_a, double mean_b, double bar_b) {
  return std::fabs(mean_a - mean_b) < bar_a + bar_b;
}

void emit_heatmap_svg(const BenchmarkReport& report, const std::filesystem::path& path,
                      const std::vector<std::string>& techniques) {
  require(!techniques.empty(), "heatmap: no techniques selected");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const std::string& model : report.model_names) {
    for (const std::string& tech : techniques) {
      const double v = report.cell(model, tech).cv.mean_mse;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  constexpr int cell_w = 110, cell_h = 44, left = 70, top = 40;
  const int width = left + cell_w * static_cast<int>(techniques.size()) + 10;
  const int height = top + cell_h * static_cast<int>(report.model_names.size()) + 10;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<style>text{font-family:sans-serif;font-size:12px;}</style>\n";
  for (std::size_t c = 0; c < techniques.size(); ++c) {
    svg += "<text x=\"" + std::to_string(left + static_cast<int>(c) * cell_w + cell_w / 2) +
           "\" y=\"" + std::to_string(top - 12) + "\" text-anchor=\"middle\">" + techniques[c] +
           "</text>\n";
  }
  for (std::size_t r = 0; r < report.model_names.size(); ++r) {
    svg += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" +
           std::to_string(top + static_cast<int>(r) * cell_h + cell_h / 2 + 4) +
           "\" text-anchor=\"end\">" + report.model_names[r] + "</text>\n";
    for (std::size_t c = 0; c < techniques.size(); ++c) {
      const double v = report.cell(report.model_names[r], techniques[c]).cv.mean_mse;
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      const auto rgb = heatmap_ramp_color(t);
      const int x = left + static_cast<int>(c) * cell_w;
      const int y = top + static_cast<int>(r) * cell_h;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell_w) + "\" height=\"" + std::to_string(cell_h) + "\" fill=\"rgb(" +
             std::to_string(rgb[0]) + "," + std::to_string(rgb[1]) + "," +
             std::to_string(rgb[2]) + ")\" stroke=\"white\"/>\n";
      svg += "<text x=\"" + std::to_string(x + cell_w / 2) + "\" y=\"" +
             std::to_string(y + cell_h / 2 + 4) + "\" text-anchor=\"middle\" fill=\"white\">" +
             fmt(v) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  write_text(path, svg);
}

void emit_errorbar_data(const BenchmarkReport& report, const std::filesystem::path& path) {
  std::string out = "model,technique,mean_mse,error_bar\n";
  for (const std::string& model : report.model_names) {
    for (const std::string& tech : report.techniques) {
      const BenchmarkCell& cell = report.cell(model, tech);
      out += model + "," + tech + "," + fmt(cell.cv.mean_mse, 6) + "," +
             fmt(cell.cv.error_bar, 6) + "\n";
    }
  }
  out += "\nmodel,technique_a,technique_b,t,p,overlap\n";
  for (const std::string& model : report.model_names) {
    if (!report.significance.count(model)) continue;
    for (const PairSignificance& pair : report.significance.at(model)) {
      const CVResult& a = report.cell(model, pair.technique_a).cv;
      const CVResult& b = report.cell(model, pair.technique_b).cv;
      const bool overlap =
          intervals_overlap(a.mean_mse, a.error_bar, b.mean_mse, b.error_bar);
      out += model + "," + pair.technique_a + "," + pair.technique_b + "," +
             fmt(pair.test.t, 6) + "," + fmt(pair.test.p, 6) + "," +
             (overlap ? "true" : "false") + "\n";
    }
  }
  write_text(path, out);
}

void emit_all(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_report_json(report, dir / "report.json");
  emit_tables(report, dir);
  emit_heatmap_svg(report, dir / "fig2_heatmap.svg");
  emit_errorbar_data(report, dir / "fig3_errorbars.csv");
}

}  // namespace fwmix
