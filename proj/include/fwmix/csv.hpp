#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fwmix/dataset.hpp"

namespace fwmix {

// Strict CSV reader: UTF-8, comma separated, header row required, dot
// decimal separator regardless of locale. Every feature cell must parse
// as a finite number; failures are reported with the file line and
// column name. Errors raise ConfigError (they are input problems).
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::optional<std::string>& region_column = std::nullopt);

// Writes header then rows in sample order. Numbers are emitted in the
// shortest form that parses back to the same double, so
// load_csv(save_csv(d)) round-trips exactly. A region column is included
// only when the dataset carries tags.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// Optional provenance sidecar: feature names, region labels, seed note.
void save_sidecar(const Dataset& dataset, const std::filesystem::path& path,
                  const SeedSpec& seed);

std::string format_double(double v);  // shortest round-trip-exact form

}  // namespace fwmix
