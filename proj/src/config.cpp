#include "metriclab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "metriclab/dsl.hpp"
#include "metriclab/errors.hpp"

namespace metriclab {

namespace {

using nlohmann::json;

void reject_non_finite(const json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw ConfigError("non-finite number at " + where);
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) reject_non_finite(j[i], where + "[" + std::to_string(i) + "]");
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) reject_non_finite(v, where + "." + k);
  }
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string("config field '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> bounds(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return {fallback};
  const json& v = j.at(key);
  try {
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("carrier field '") + key + "' must be a number or an array of numbers");
  }
}

PointSpace make_carrier(const json& config) {
  if (!config.contains("carrier") || !config["carrier"].is_object()) {
    throw ConfigError("config needs a 'carrier' object or a 'gallery' name");
  }
  const json& c = config["carrier"];
  const std::string kind = get<std::string>(c, "kind", "");
  const std::uint64_t seed = get_count(config, "seed", get_count(c, "seed", 0));

  if (kind == "finite") {
    if (!c.contains("points") || !c["points"].is_array()) throw ConfigError("finite carrier needs 'points'");
    std::vector<Point> pts;
    for (const json& p : c["points"]) {
      try {
        pts.push_back(point_from_json(p));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError(std::string("bad carrier point: ") + e.what());
      }
    }
    return PointSpace::finite(std::move(pts));
  }
  if (kind == "integers") {
    const auto from = get<std::int64_t>(c, "from", 0), to = get<std::int64_t>(c, "to", -1);
    if (to < from) throw ConfigError("integer carrier needs from <= to");
    if (to - from >= 100000) throw ConfigError("integer carrier is too large to enumerate");
    std::vector<Point> pts;
    for (auto v = from; v <= to; ++v) pts.push_back(Point::label(static_cast<double>(v)));
    return PointSpace::finite(std::move(pts));
  }
  if (kind == "sampled") {
    const std::uint64_t dim =
        get_count(c, "dim", get_count(config, "dim", get_count(config, "grid", 0)));
    if (dim == 0 || dim > 1000000) throw ConfigError("sampled carrier needs 1 <= dim");
    return PointSpace::sampled(dim, bounds(c, "lo", -1.0), bounds(c, "hi", 1.0), seed);
  }
  throw ConfigError("carrier kind must be finite, integers or sampled (got '" + kind + "')");
}

Kernel kernel_field(const json& config, const char* key, unsigned arity, std::optional<double> fallback) {
  if (!config.contains(key)) {
    if (!fallback) throw ConfigError(std::string("config needs '") + key + "'");
    return Kernel::constant(arity, *fallback);
  }
  const json& v = config.at(key);
  if (v.is_number()) return Kernel::constant(arity, v.get<double>());
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be an expression string");
  return Kernel::from_expression(std::make_shared<const dsl::Expr>(dsl::parse(v.get<std::string>(), arity)));
}

LoadedSpace from_gallery(const json& config) {
  GalleryParams p;
  const std::string name = get<std::string>(config, "gallery", "");
  p.inf_k = static_cast<int>(get_count(config, "K", p.inf_k));
  p.quartic_max = static_cast<int>(get_count(config, "range", p.quartic_max));
  p.lp_dim = get_count(config, "dim", p.lp_dim);
  p.lp_p = get<double>(config, "p", p.lp_p);
  p.cab_grid = get_count(config, "grid", p.cab_grid);
  p.cab_zeta = get<double>(config, "zeta", p.cab_zeta);
  p.seed = get_count(config, "seed", p.seed);
  if (p.inf_k > 5000 || p.quartic_max > 100000) throw ConfigError("gallery truncation too large");
  GalleryEntry e = load_gallery(name, p);
  std::string hash = e.content_hash();
  return {std::move(e.space), std::move(e.bundle), name, std::move(hash)};
}

}  // namespace

LoadedSpace make_space(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  reject_non_finite(config, "config");
  if (config.contains("gallery")) return from_gallery(config);

  const std::string mode_name = get<std::string>(config, "mode", "two_point");
  Mode mode;
  if (mode_name == "two_point") {
    mode = Mode::TwoPoint;
  } else if (mode_name == "s_mode") {
    mode = Mode::SMode;
  } else {
    throw ConfigError("mode must be two_point or s_mode");
  }
  const unsigned arity = mode == Mode::TwoPoint ? 2 : 3;
  const bool three = get<bool>(config, "three_point_zeta", false) || mode == Mode::SMode;

  PointSpace space = make_carrier(config);
  KernelBundle bundle(mode, kernel_field(config, "D", arity, std::nullopt),
                      kernel_field(config, "hbar", arity, 0.0),
                      kernel_field(config, "zeta", three ? 3 : 2, 1.0));
  std::string hash = content_hash(space.describe() + "\n" + bundle.describe());
  return {std::move(space), std::move(bundle), std::nullopt, std::move(hash)};
}

LoadedSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json config;
  try {
    config = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return make_space(config);
}

}  // namespace metriclab
