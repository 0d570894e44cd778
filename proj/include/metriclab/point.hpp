#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace metriclab {

/// An element of a carrier set: a numeric label (finite spaces, with the
/// distinguished label INF for +infinity) or a finite real vector.
class Point {
 public:
  enum class Kind { Label, Infinity, Vector };

  Point() = default;

  static Point label(double value);
  static Point infinity();
  static Point vector(std::vector<double> coords);

  Kind kind() const { return kind_; }
  bool is_label() const { return kind_ == Kind::Label; }
  bool is_infinity() const { return kind_ == Kind::Infinity; }
  bool is_vector() const { return kind_ == Kind::Vector; }

  /// Label value. Only meaningful for Kind::Label.
  double value() const { return value_; }
  std::span<const double> coords() const { return coords_; }
  std::size_t dimension() const { return coords_.size(); }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  Kind kind_ = Kind::Label;
  double value_ = 0.0;
  std::vector<double> coords_;
};

/// Coordinate-wise (or label) equality within an absolute tolerance.
bool approx_equal(const Point& a, const Point& b, double tol);

std::string to_string(const Point& p);

/// Labels serialize as numbers, INF as the string "INF", vectors as arrays.
nlohmann::json to_json(const Point& p);
Point point_from_json(const nlohmann::json& j);

}  // namespace metriclab
