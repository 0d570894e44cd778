#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "metriclab/kernel.hpp"
#include "metriclab/space.hpp"

namespace metriclab {

inline constexpr std::string_view kGalleryVersion = "gallery-1";

/// Truncation and sampling knobs. Expected facts are asserted at defaults.
struct GalleryParams {
  int inf_k = 6;           // X = {1..2K} u {INF}
  int quartic_max = 20;      // X = {1..quartic_max}
  std::size_t lp_dim = 8;    // truncation N of l^p
  double lp_p = 0.5;
  std::size_t cab_grid = 64; // grid points M on [0, 1]
  double cab_zeta = 2.0;
  std::uint64_t seed = 20240601;
};

struct GalleryEntry;

struct FactOutcome {
  std::string description;
  bool holds = false;
  std::string detail;
};

/// A machine-checkable statement about a gallery entry.
struct Fact {
  std::string description;
  std::function<FactOutcome(const GalleryEntry&, unsigned workers)> check;
};

struct GalleryEntry {
  std::string name;
  std::string provenance;
  PointSpace space;
  KernelBundle bundle;
  std::vector<Fact> expected;

  /// Hash over the version stamp, carrier description and kernel sources.
  std::string content_hash() const;
};

std::vector<std::string> gallery_names();

/// Throws ConfigError for unknown names.
GalleryEntry load_gallery(std::string_view name, const GalleryParams& params = {});

std::vector<FactOutcome> run_facts(const GalleryEntry& entry, unsigned workers = 1);

}  // namespace metriclab
