#include "metriclab/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "metriclab/errors.hpp"

namespace metriclab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PointSpace PointSpace::finite(std::vector<Point> points) {
  if (points.empty()) throw ConfigError("finite carrier must contain at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw ConfigError("finite carrier contains duplicate point " + to_string(points[i]));
      }
    }
  }
  PointSpace s;
  s.kind_ = Kind::FiniteEnumerated;
  s.dimension_ = points.front().dimension();
  s.points_ = std::move(points);
  return s;
}

PointSpace PointSpace::sampled(std::size_t dimension, std::vector<double> lo,
                               std::vector<double> hi, std::uint64_t seed) {
  if (dimension == 0) throw ConfigError("sampled carrier needs dimension >= 1");
  if (lo.size() == 1 && dimension > 1) lo.assign(dimension, lo[0]);
  if (hi.size() == 1 && dimension > 1) hi.assign(dimension, hi[0]);
  if (lo.size() != dimension || hi.size() != dimension) {
    throw ConfigError("sampled carrier bounds must have one entry or one per coordinate");
  }
  for (std::size_t i = 0; i < dimension; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] <= hi[i])) {
      throw ConfigError("sampled carrier bounds must be finite with lo <= hi");
    }
  }
  PointSpace s;
  s.kind_ = Kind::NumericSampled;
  s.dimension_ = dimension;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  s.seed_ = seed;
  return s;
}

Point PointSpace::sample(std::uint64_t stream, std::uint64_t index,
                         unsigned slot) const {
  if (is_finite()) {
    std::uint64_t h = mix64(mix64(stream) ^ mix64(index * 8 + slot));
    return points_[h % points_.size()];
  }
  std::mt19937_64 rng(mix64(mix64(stream ^ 0x5eedULL) + mix64(index)) ^ mix64(slot + 1));
  std::vector<double> coords(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) {
    // 53 random bits mapped to [0, 1); portable unlike uniform_real_distribution.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    coords[i] = lo_[i] + (hi_[i] - lo_[i]) * u;
  }
  return Point::vector(std::move(coords));
}

bool PointSpace::contains(const Point& p, double tol) const {
  if (is_finite()) {
    return std::any_of(points_.begin(), points_.end(),
                       [&](const Point& q) { return approx_equal(p, q, tol); });
  }
  if (!p.is_vector() || p.dimension() != dimension_) return false;
  for (std::size_t i = 0; i < dimension_; ++i) {
    double c = p.coords()[i];
    if (c < lo_[i] - tol || c > hi_[i] + tol) return false;
  }
  return true;
}

std::string PointSpace::describe() const {
  std::ostringstream os;
  if (is_finite()) {
    os << "finite{";
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (i) os << ',';
      os << to_string(points_[i]);
    }
    os << '}';
  } else {
    os.precision(17);
    os << "sampled{dim=" << dimension_ << ",lo=";
    for (double v : lo_) os << v << ';';
    os << "hi=";
    for (double v : hi_) os << v << ';';
    os << "seed=" << seed_ << '}';
  }
  return os.str();
}

TupleSource::TupleSource(const PointSpace& space, unsigned arity,
                         std::uint64_t budget, std::uint64_t seed)
    : space_(&space), arity_(arity), seed_(seed) {
  if (arity == 0) throw ConfigError("tuple arity must be >= 1");
  if (space.is_finite()) {
    size_ = 1;
    for (unsigned i = 0; i < arity; ++i) size_ *= space.points().size();
  } else {
    if (budget == 0) throw ConfigError("budget must be >= 1");
    size_ = budget;
  }
}

void TupleSource::get(std::uint64_t k, std::span<Point> out) const {
  if (space_->is_finite()) {
    const auto pts = space_->points();
    const std::uint64_t n = pts.size();
    // Mixed radix, first slot most significant: lexicographic order.
    for (unsigned slot = arity_; slot-- > 0;) {
      out[slot] = pts[k % n];
      k /= n;
    }
    return;
  }
  for (unsigned slot = 0; slot < arity_; ++slot) out[slot] = space_->sample(seed_, k, slot);
}

std::vector<Point> TupleSource::operator[](std::uint64_t k) const {
  std::vector<Point> out(arity_);
  get(k, out);
  return out;
}

std::vector<std::pair<Point, Point>> enumerate_pairs(const PointSpace& space,
                                                     std::uint64_t budget,
                                                     std::uint64_t seed) {
  TupleSource src(space, 2, budget, seed);
  std::vector<std::pair<Point, Point>> out;
  out.reserve(src.size());
  Point buf[2];
  for (std::uint64_t k = 0; k < src.size(); ++k) {
    src.get(k, buf);
    out.emplace_back(buf[0], buf[1]);
  }
  return out;
}

}  // namespace metriclab
