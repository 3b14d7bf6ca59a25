#include "fwmix/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "fwmix/common.hpp"

namespace fwmix {

namespace {

constexpr const char* kRegionColumn = "region";

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                  const std::string& column) {
  const auto where = [&] {
    std::ostringstream os;
    os << path.string() << ": row " << row << ", column '" << column << "'";
    return os.str();
  };
  require_config(!cell.empty(), where() + ": empty cell");
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  require_config(ec == std::errc() && ptr == end, where() + ": not a number: '" + cell + "'");
  require_config(is_finite(value), where() + ": non-finite value");
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::optional<std::string>& region_column) {
  std::ifstream in(path);
  require_config(in.good(), "cannot open '" + path.string() + "'");

  std::string line;
  require_config(static_cast<bool>(std::getline(in, line)), path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  std::set<std::string> seen;
  for (const auto& name : header) {
    require_config(!name.empty(), path.string() + ": empty column name in header");
    require_config(seen.insert(name).second,
                   path.string() + ": duplicate column '" + name + "'");
  }

  std::ptrdiff_t target_idx = -1;
  std::ptrdiff_t region_idx = -1;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target_column) {
      target_idx = static_cast<std::ptrdiff_t>(c);
    } else if (region_column && header[c] == *region_column) {
      region_idx = static_cast<std::ptrdiff_t>(c);
    } else {
      feature_names.push_back(header[c]);
      feature_cols.push_back(c);
    }
  }
  require_config(target_idx >= 0,
                 path.string() + ": target column '" + target_column + "' not in header");
  require_config(!region_column || region_idx >= 0,
                 path.string() + ": region column '" + (region_column ? *region_column : "") +
                     "' not in header");
  require_config(!feature_names.empty(), path.string() + ": no feature columns");

  Dataset dataset(feature_names, target_column);
  std::vector<double> row_features(feature_names.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_line(line);
    require_config(cells.size() == header.size(),
                   path.string() + ": row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    for (std::size_t f = 0; f < feature_cols.size(); ++f)
      row_features[f] = parse_cell(cells[feature_cols[f]], path, row, feature_names[f]);
    const double target =
        parse_cell(cells[static_cast<std::size_t>(target_idx)], path, row, target_column);
    std::string region;
    if (region_idx >= 0) region = cells[static_cast<std::size_t>(region_idx)];
    dataset.append(row_features, target, std::move(region));
  }
  require_config(!dataset.empty(), path.string() + ": no data rows");
  return dataset;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  const bool with_region = dataset.has_regions();
  if (with_region) {
    for (const auto& name : dataset.feature_names())
      require(name != kRegionColumn, "save_csv: feature named '" + std::string(kRegionColumn) +
                                         "' clashes with the region column");
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const std::string& r = dataset.region(i);
      require(r.find(',') == std::string::npos && r.find('\n') == std::string::npos,
              "save_csv: region tag contains a separator");
    }
  }

  std::ofstream out(path);
  require(out.good(), "save_csv: cannot open '" + path.string() + "'");
  for (const auto& name : dataset.feature_names()) out << name << ',';
  out << dataset.target_name();
  if (with_region) out << ',' << kRegionColumn;
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto x = dataset.features(i);
    for (double v : x) out << format_double(v) << ',';
    out << format_double(dataset.target(i));
    if (with_region) out << ',' << dataset.region(i);
    out << '\n';
  }
  require(out.good(), "save_csv: write failed for '" + path.string() + "'");
}

void save_sidecar(const Dataset& dataset, const std::filesystem::path& path,
                  const SeedSpec& seed) {
  nlohmann::ordered_json j;
  j["n"] = dataset.size();
  j["m"] = dataset.dim();
  j["feature_names"] = dataset.feature_names();
  j["target"] = dataset.target_name();
  nlohmann::ordered_json regions = nlohmann::ordered_json::object();
  for (const auto& [tag, count] : summary_stats(dataset).region_counts) regions[tag] = count;
  j["regions"] = std::move(regions);
  j["seed"] = {{"master_seed", seed.master_seed}, {"stream_label", seed.stream_label}};

  std::ofstream out(path);
  require(out.good(), "save_sidecar: cannot open '" + path.string() + "'");
  out << j.dump(2) << '\n';
  require(out.good(), "save_sidecar: write failed for '" + path.string() + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc(), "format_double: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace fwmix
