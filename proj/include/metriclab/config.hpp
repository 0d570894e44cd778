#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "metriclab/gallery.hpp"
#include "metriclab/kernel.hpp"
#include "metriclab/space.hpp"

namespace metriclab {

/// A validated space built from a SpaceConfig document.
struct LoadedSpace {
  PointSpace space;
  KernelBundle bundle;
  std::optional<std::string> gallery;
  std::string content_hash;
};

/// Builds a space from a SpaceConfig:
///   {"gallery": "<name>", ...gallery params}
/// or
///   {"carrier": {...}, "D": "<expr>", "hbar": "<expr>"?, "zeta": "<expr>"?,
///    "mode": "two_point"|"s_mode", "three_point_zeta": bool?, "seed": int?,
///    "grid": int?, "dim": int?}
/// Throws ConfigError (including dsl::ParseError / dsl::ArityError).
LoadedSpace make_space(const nlohmann::json& config);

/// Reads and parses a JSON file, then calls make_space.
LoadedSpace load_space(const std::filesystem::path& path);

}  // namespace metriclab
