#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metriclab/kernel.hpp"
#include "metriclab/space.hpp"

namespace metriclab {

inline constexpr double kAxiomTol = 1e-9;

enum class FamilyKind {
  Metric,
  BMetric,
  ExtendedB,
  ExtendedB3,
  PerturbedMetric,
  PerturbedB,
  PerturbedExtendedB,
  PerturbedExtendedB3,
  SMetric,
  SbMetric,
  ExtendedSb,
  PerturbedExtendedSb,
};

/// An axiom family. `s` is the constant coefficient of the BMetric,
/// PerturbedB and SbMetric families and is ignored by the others.
struct AxiomFamily {
  FamilyKind kind = FamilyKind::Metric;
  double s = 1.0;

  /// Perturbed families check D - hbar; the others check D with hbar = 0.
  bool perturbed() const;
  /// Three-argument (S-metric style) families.
  bool multi_point() const;
  /// Families whose coefficient comes from the bundle's zeta.
  bool uses_zeta() const;
  bool uses_three_point_zeta() const;

  friend bool operator==(const AxiomFamily&, const AxiomFamily&) = default;
};

/// Snake-case family name, e.g. "perturbed_extended_b".
std::string family_name(FamilyKind kind);
/// Inverse of family_name; throws ConfigError on unknown names.
AxiomFamily parse_family(std::string_view name, double s = 1.0);

enum class AxiomName { Identity, Positivity, Symmetry, RelaxedTriangle };
std::string axiom_name(AxiomName name);

enum class Coverage { Exhaustive, Statistical };

/// Outcome of one axiom over the checked tuples.
///
/// `worst` is the extremal quantity for the axiom: for relaxed_triangle the
/// largest ratio lhs / (coefficient * sum) (zero denominators skipped when
/// lhs <= tol, +inf when lhs > tol); for identity the largest |d(v, v)|; for
/// positivity the smallest d; for symmetry the largest |d(v,w) - d(w,v)|.
struct AxiomResult {
  AxiomName name = AxiomName::Identity;
  bool passed = true;
  Coverage coverage = Coverage::Exhaustive;
  std::uint64_t checked = 0;
  double worst = 0.0;
  /// First failing tuple in stream order, else the tuple attaining `worst`.
  std::vector<Point> witness;
  std::optional<std::uint64_t> witness_index;
  /// relaxed_triangle only: tuples whose ratio is within tol of `worst`
  /// (lowest indices first, capped at kMaxBinding).
  std::vector<std::vector<Point>> binding;
  std::uint64_t binding_count = 0;
};

inline constexpr std::size_t kMaxBinding = 1024;

struct AxiomReport {
  AxiomFamily family;
  Mode mode = Mode::TwoPoint;
  std::vector<AxiomResult> axioms;

  bool passed() const;
  const AxiomResult& axiom(AxiomName name) const;
};

struct CheckOptions {
  std::uint64_t budget = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double tol = kAxiomTol;
};

/// Two-point families: positivity, identity, symmetry, relaxed triangle.
/// Exhaustive over finite carriers, `budget` seeded tuples otherwise.
AxiomReport check_axioms(const PointSpace& space, const KernelBundle& bundle,
                         const AxiomFamily& family, const CheckOptions& options);

/// S-metric families: positivity, identity (S = 0 iff v = w = z) and the
/// quadruple inequality S(v,w,z) <= zeta(v,w,z) (S(v,v,t) + S(w,w,t) + S(z,z,t)).
AxiomReport check_sb_axioms(const PointSpace& space, const KernelBundle& bundle,
                            const AxiomFamily& family,
                            const CheckOptions& options);

/// Dispatches to check_axioms or check_sb_axioms.
AxiomReport run_family(const PointSpace& space, const KernelBundle& bundle,
                       const AxiomFamily& family, const CheckOptions& options);

/// Re-evaluates one tuple outside the engine. Tuple arity: 2 for identity,
/// positivity and symmetry; 3 for the triangle; S families use 3 and 4.
bool violates(const KernelBundle& bundle, const AxiomFamily& family,
              AxiomName axiom, std::span<const Point> tuple,
              double tol = kAxiomTol);

/// d(v, z) - coefficient * (d(v, w) + d(w, z)) for a triple under `family`;
/// negative means slack.
double triangle_excess(const KernelBundle& bundle, const AxiomFamily& family,
                       const Point& v, const Point& w, const Point& z);

struct CoefficientResult {
  double s_star = 0.0;
  bool unbounded = false;
  std::vector<Point> witness;
  std::uint64_t checked = 0;
  bool exhaustive = true;
  std::vector<std::string> warnings;
};

/// Least s making d(v,z) <= s (d(v,w) + d(w,z)) hold on the checked triples,
/// for the exact metric d = D - hbar.
CoefficientResult minimal_b_coefficient(const PointSpace& space,
                                        const KernelBundle& bundle,
                                        const CheckOptions& options);

struct ContinuityResult {
  double limit_along_approach = 0.0;
  double value_at_target = 0.0;
  bool discontinuous = false;
  double richardson = 0.0;
  double tail_spread = 0.0;
};

/// Compares lim_k d(approach_k, probe) with d(target, probe). The approach
/// must converge to target: d(approach_k, target) nonincreasing, last <= tol.
ContinuityResult continuity_probe(const KernelBundle& bundle,
                                  const Point& target,
                                  std::span<const Point> approach,
                                  const Point& probe, double tol = kAxiomTol);

}  // namespace metriclab
