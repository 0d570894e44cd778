#include "metriclab/point.hpp"

#include <charconv>
#include <cmath>

#include "metriclab/errors.hpp"

namespace metriclab {

Point Point::label(double value) {
  if (!std::isfinite(value)) {
    throw ConfigError("point label must be finite (use Point::infinity for INF)");
  }
  Point p;
  p.kind_ = Kind::Label;
  p.value_ = value;
  return p;
}

Point Point::infinity() {
  Point p;
  p.kind_ = Kind::Infinity;
  return p;
}

Point Point::vector(std::vector<double> coords) {
  if (coords.empty()) throw ConfigError("vector point must have dimension >= 1");
  for (double c : coords) {
    if (!std::isfinite(c)) throw ConfigError("vector point coordinates must be finite");
  }
  Point p;
  p.kind_ = Kind::Vector;
  p.coords_ = std::move(coords);
  return p;
}

bool approx_equal(const Point& a, const Point& b, double tol) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Point::Kind::Infinity:
      return true;
    case Point::Kind::Label:
      return std::abs(a.value() - b.value()) <= tol;
    case Point::Kind::Vector:
      if (a.dimension() != b.dimension()) return false;
      for (std::size_t i = 0; i < a.dimension(); ++i) {
        if (std::abs(a.coords()[i] - b.coords()[i]) > tol) return false;
      }
      return true;
  }
  return false;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const Point& p) {
  switch (p.kind()) {
    case Point::Kind::Infinity:
      return "INF";
    case Point::Kind::Label:
      return shortest(p.value());
    case Point::Kind::Vector: {
      std::string s = "(";
      for (std::size_t i = 0; i < p.dimension(); ++i) {
        if (i) s += ", ";
        s += shortest(p.coords()[i]);
      }
      return s + ")";
    }
  }
  return {};
}

nlohmann::json to_json(const Point& p) {
  switch (p.kind()) {
    case Point::Kind::Infinity:
      return "INF";
    case Point::Kind::Label:
      return p.value();
    case Point::Kind::Vector:
      return nlohmann::json(std::vector<double>(p.coords().begin(), p.coords().end()));
  }
  return nullptr;
}

Point point_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "INF") return Point::infinity();
    throw ConfigError("point: unknown symbol '" + j.get<std::string>() + "'");
  }
  if (j.is_number()) return Point::label(j.get<double>());
  if (j.is_array()) {
    std::vector<double> coords;
    for (const auto& c : j) {
      if (!c.is_number()) throw ConfigError("point: vector coordinates must be numbers");
      coords.push_back(c.get<double>());
    }
    return Point::vector(std::move(coords));
  }
  throw ConfigError("point: expected a number, \"INF\" or an array of numbers");
}

}  // namespace metriclab
