#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metriclab/kernel.hpp"
#include "metriclab/space.hpp"

namespace metriclab {

/// T : X -> X. Either per-coordinate DSL expressions or a native function.
class SelfMap {
 public:
  using Fn = std::function<Point(const Point&)>;

  SelfMap(Fn fn, std::string source);

  /// `text` is one expression (applied to every coordinate with `i` bound to
  /// the coordinate index, or to the label value on finite carriers), or a
  /// ';'-separated list with one expression per coordinate.
  static SelfMap parse(std::string_view text, const PointSpace& space);

  Point operator()(const Point& v) const { return fn_(v); }
  const std::string& source() const { return source_; }

 private:
  Fn fn_;
  std::string source_;
};

enum class StopReason { Converged, MaxIter, NonContractive, Diverged, EvaluationError };
std::string stop_reason_name(StopReason r);

struct PicardOptions {
  double tol = 1e-10;
  std::uint64_t max_iter = 10000;
  std::size_t window = 8;
  double divergence_limit = 1e12;
  /// Optional user contraction constant; c_used = max(user_c, orbit c_hat).
  std::optional<double> user_c;
};

struct PicardTrace {
  std::vector<Point> iterates;
  std::vector<double> steps_D;
  std::vector<double> steps_d;
  double Im = 0.0;  // D(v0, v1)
  double c_used = 0.0;
  StopReason stop_reason = StopReason::MaxIter;
  std::string error;
};

/// Largest D(v_{k+1}, v_{k+2}) / D(v_k, v_{k+1}) along the orbit, over
/// steps with D(v_k, v_{k+1}) > tol.
double orbit_contraction(const PicardTrace& trace, double tol = 1e-9);

/// Picard iteration v_{k+1} = T(v_k). Converged when d(v_n, v_{n+1}) <= tol
/// and every pair in the last `window` iterates is within 4 tol in the exact
/// metric. Never throws on evaluation failure: the trace up to the failure is
/// returned with `error` set.
PicardTrace picard_run(const PointSpace& space, const KernelBundle& bundle,
                       const SelfMap& T, const Point& v0,
                       const PicardOptions& options = {});

struct ContractionEstimate {
  double c_hat = 0.0;
  std::pair<Point, Point> witness;
  std::uint64_t checked = 0;
  bool exhaustive = true;
};

/// c_hat = max D(Tv, Tw) / D(v, w) over pairs with D(v, w) > tol.
/// Throws EvaluationError (NoUsablePairs) when every pair is degenerate.
ContractionEstimate estimate_contraction(const PointSpace& space,
                                         const KernelBundle& bundle,
                                         const SelfMap& T, std::uint64_t budget,
                                         std::uint64_t seed,
                                         double tol = 1e-9,
                                         unsigned workers = 1);

struct TailPair {
  std::size_t n = 0, m = 0;
  double zeta = 0.0;
};

struct HypothesisCheck {
  std::vector<TailPair> tail_pairs;
  double sup_tail_zeta = 0.0;
  double threshold = 0.0;  // 1 / c, +inf when c == 0
  bool satisfied = false;
};

inline constexpr double kHypothesisMargin = 1e-9;

/// Empirical lim sup of zeta(v_n, v_m) over the final tail of the orbit,
/// compared against 1 / c.
HypothesisCheck check_hypothesis(const PicardTrace& trace,
                                 const KernelBundle& bundle, double c,
                                 double tail_fraction = 0.5);

struct BoundEnvelope {
  double c = 0.0;
  /// geometric[n] = c^n Im, one entry per step.
  std::vector<double> geometric;
  /// daleth[n] = sum_{j=1..n} c^j prod_{i=1..j} zeta(v_i, v_M), M the final
  /// iterate index; one entry per iterate (daleth[0] = 0).
  std::vector<double> daleth;
};

BoundEnvelope bound_envelope(const PicardTrace& trace,
                             const KernelBundle& bundle, double c);

struct BoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool holds() const { return violations == 0; }
};

/// steps_D[n] <= c^n Im + tol and steps_d[n] <= c^n Im + tol for every step.
BoundCheck check_step_bound(const PicardTrace& trace,
                            const BoundEnvelope& envelope, double tol);

/// d(v_n, v_m) <= Im (daleth[m-1] - daleth[n]) + m tol over all n < m, with
/// daleth taken from the envelope exactly as displayed.
BoundCheck check_series_bound(const PicardTrace& trace,
                              const KernelBundle& bundle,
                              const BoundEnvelope& envelope, double tol);

/// The chained relaxed-triangle estimate
///   d(v_n, v_m) <= Im sum_{j=n}^{m-1} c^j prod_{i=n}^{j} zeta(v_i, v_m) + m tol
/// over all n < m.
BoundCheck check_chained_bound(const PicardTrace& trace,
                               const KernelBundle& bundle, double c,
                               double tol);

/// max over the orbit tail of d(T v_n, T theta), theta the last iterate.
double orbit_continuity_gap(const PicardTrace& trace, const KernelBundle& bundle,
                            const SelfMap& T, double tail_fraction = 0.5);

struct FixedPointVerdict {
  double residual_d = 0.0;
  double residual_D_gap = 0.0;
  bool is_fixed = false;
};

FixedPointVerdict verify_fixed_point(const PointSpace& space,
                                     const KernelBundle& bundle,
                                     const SelfMap& T, const Point& candidate,
                                     double tol);

struct UniquenessResult {
  std::vector<Point> limits;
  std::vector<StopReason> stop_reasons;
  std::vector<std::vector<double>> pairwise_d;
  bool all_agree = false;
  std::optional<std::size_t> failing_seed;
};

UniquenessResult uniqueness_probe(const PointSpace& space,
                                  const KernelBundle& bundle, const SelfMap& T,
                                  std::span<const Point> seeds,
                                  const PicardOptions& options = {});

}  // namespace metriclab
