#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "metriclab/axioms.hpp"
#include "metriclab/fixed_point.hpp"
#include "metriclab/gallery.hpp"

namespace metriclab {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::string outcome;
  std::int64_t wall_ms = 0;
};

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const AxiomResult& r);
nlohmann::json to_json(const AxiomReport& r);
nlohmann::json to_json(const CoefficientResult& r);
nlohmann::json to_json(const ContinuityResult& r);

/// Non-finite reals serialize as null.
nlohmann::json real_to_json(double v);

/// Writes `text` to `path` via a sibling temporary and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace metriclab
