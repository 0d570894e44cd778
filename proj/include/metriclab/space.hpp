#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metriclab/point.hpp"

namespace metriclab {

/// Carrier set: either an explicit finite list of points, or a box in R^N
/// from which points are drawn deterministically given a seed.
class PointSpace {
 public:
  enum class Kind { FiniteEnumerated, NumericSampled };

  /// Throws ConfigError if `points` is empty or contains duplicates.
  static PointSpace finite(std::vector<Point> points);
  static PointSpace sampled(std::size_t dimension, std::vector<double> lo,
                            std::vector<double> hi, std::uint64_t seed);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::FiniteEnumerated; }
  std::span<const Point> points() const { return points_; }
  std::size_t dimension() const { return dimension_; }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  std::uint64_t seed() const { return seed_; }

  /// Draws the point in `slot` of tuple `index` of the stream `stream`.
  /// Pure function of its arguments, so any worker can regenerate any tuple.
  Point sample(std::uint64_t stream, std::uint64_t index, unsigned slot) const;

  /// Membership: label present in the finite set, or every coordinate
  /// inside [lo - tol, hi + tol].
  bool contains(const Point& p, double tol = 0.0) const;

  /// Canonical text used for content hashing.
  std::string describe() const;

 private:
  Kind kind_ = Kind::FiniteEnumerated;
  std::vector<Point> points_;
  std::size_t dimension_ = 0;
  std::vector<double> lo_, hi_;
  std::uint64_t seed_ = 0;
};

/// Ordered tuples of a fixed arity over a space. Finite carriers are
/// enumerated exhaustively in lexicographic order; sampled carriers yield
/// exactly `budget` seeded tuples, and the tuples at budget B are a prefix
/// of those at any larger budget.
class TupleSource {
 public:
  TupleSource(const PointSpace& space, unsigned arity, std::uint64_t budget,
              std::uint64_t seed);

  std::uint64_t size() const { return size_; }
  bool exhaustive() const { return space_->is_finite(); }
  unsigned arity() const { return arity_; }

  /// Fills `out` (size == arity) with tuple `k`.
  void get(std::uint64_t k, std::span<Point> out) const;
  std::vector<Point> operator[](std::uint64_t k) const;

 private:
  const PointSpace* space_;
  unsigned arity_;
  std::uint64_t size_;
  std::uint64_t seed_;
};

std::vector<std::pair<Point, Point>> enumerate_pairs(const PointSpace& space,
                                                     std::uint64_t budget,
                                                     std::uint64_t seed);

/// splitmix64 finalizer; the mixing step behind every seeded draw.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view text);

}  // namespace metriclab
