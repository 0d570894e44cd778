#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "metriclab/dsl.hpp"
#include "metriclab/point.hpp"

namespace metriclab {

/// An evaluable function of 2 or 3 points with a textual description.
class Kernel {
 public:
  using Fn = std::function<double(std::span<const Point* const>)>;

  Kernel() = default;
  Kernel(unsigned arity, Fn fn, std::string source);

  static Kernel constant(unsigned arity, double value);
  static Kernel from_expression(std::shared_ptr<const dsl::Expr> expr);

  unsigned arity() const { return arity_; }
  const std::string& source() const { return source_; }

  double operator()(const Point& a, const Point& b) const;
  double operator()(const Point& a, const Point& b, const Point& c) const;
  double operator()(std::span<const Point* const> args) const;

 private:
  unsigned arity_ = 0;
  Fn fn_;
  std::string source_;
};

enum class Mode { TwoPoint, SMode };

/// The triple (D, hbar, zeta). In TwoPoint mode D and hbar take two points;
/// in SMode they take three. zeta takes two points, or three when the
/// three-point control is in use (always three in SMode).
///
/// Accessors enforce the codomains: D >= 0, hbar >= 0, zeta >= 1, all
/// finite. A violation raises EvaluationError naming the offending tuple.
class KernelBundle {
 public:
  KernelBundle(Mode mode, Kernel observed, Kernel perturbation, Kernel control);

  Mode mode() const { return mode_; }
  bool three_point_zeta() const { return control_.arity() == 3; }

  const Kernel& observed_kernel() const { return observed_; }
  const Kernel& perturbation_kernel() const { return perturbation_; }
  const Kernel& control_kernel() const { return control_; }

  double observed(const Point& v, const Point& w) const;
  double perturbation(const Point& v, const Point& w) const;
  double control(const Point& v, const Point& w) const;
  double control(const Point& v, const Point& w, const Point& z) const;

  double observed(const Point& v, const Point& w, const Point& z) const;
  double perturbation(const Point& v, const Point& w, const Point& z) const;

  /// Same kernels with hbar replaced by the constant 0.
  KernelBundle without_perturbation() const;
  /// Same kernels with zeta replaced.
  KernelBundle with_control(Kernel control) const;

  std::string describe() const;

 private:
  Mode mode_;
  Kernel observed_, perturbation_, control_;
};

/// d(v, w) = D(v, w) - hbar(v, w): one subtraction, never clamped.
double exact_distance(const KernelBundle& bundle, const Point& v,
                      const Point& w);
/// S_b(v, w, z) = S(v, w, z) - hbar_S(v, w, z).
double exact_distance(const KernelBundle& bundle, const Point& v,
                      const Point& w, const Point& z);

}  // namespace metriclab
