#include "metriclab/axioms.hpp"

#include <cmath>
#include <limits>

#include "metriclab/errors.hpp"
#include "parallel.hpp"

namespace metriclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyInfo {
  FamilyKind kind;
  const char* name;
};

constexpr FamilyInfo kFamilies[] = {
    {FamilyKind::Metric, "metric"},
    {FamilyKind::BMetric, "b_metric"},
    {FamilyKind::ExtendedB, "extended_b"},
    {FamilyKind::ExtendedB3, "extended_b3"},
    {FamilyKind::PerturbedMetric, "perturbed_metric"},
    {FamilyKind::PerturbedB, "perturbed_b"},
    {FamilyKind::PerturbedExtendedB, "perturbed_extended_b"},
    {FamilyKind::PerturbedExtendedB3, "perturbed_extended_b3"},
    {FamilyKind::SMetric, "s_metric"},
    {FamilyKind::SbMetric, "sb_metric"},
    {FamilyKind::ExtendedSb, "extended_sb"},
    {FamilyKind::PerturbedExtendedSb, "perturbed_extended_sb"},
};

// Distance and coefficient for one family; hbar is dropped for the
// non-perturbed families.
class Evaluator {
 public:
  Evaluator(const KernelBundle& bundle, const AxiomFamily& family)
      : bundle_(bundle), family_(family) {}

  double d(const Point& v, const Point& w) const {
    return family_.perturbed() ? exact_distance(bundle_, v, w) : bundle_.observed(v, w);
  }

  double s(const Point& v, const Point& w, const Point& z) const {
    return family_.perturbed() ? exact_distance(bundle_, v, w, z) : bundle_.observed(v, w, z);
  }

  double coefficient(const Point& v, const Point& w, const Point& z) const {
    switch (family_.kind) {
      case FamilyKind::Metric:
      case FamilyKind::PerturbedMetric:
      case FamilyKind::SMetric:
        return 1.0;
      case FamilyKind::BMetric:
      case FamilyKind::PerturbedB:
      case FamilyKind::SbMetric:
        return family_.s;
      case FamilyKind::ExtendedB:
      case FamilyKind::PerturbedExtendedB:
        return bundle_.control(v, z);
      case FamilyKind::ExtendedB3:
      case FamilyKind::PerturbedExtendedB3:
      case FamilyKind::ExtendedSb:
      case FamilyKind::PerturbedExtendedSb:
        return bundle_.control(v, w, z);
    }
    return 1.0;
  }

 private:
  const KernelBundle& bundle_;
  const AxiomFamily& family_;
};

void validate(const KernelBundle& bundle, const AxiomFamily& family, bool multi_point) {
  if (family.multi_point() != multi_point) {
    throw ConfigError("family " + family_name(family.kind) +
                      (multi_point ? " is not an S-metric family" : " needs check_sb_axioms"));
  }
  const Mode want = multi_point ? Mode::SMode : Mode::TwoPoint;
  if (bundle.mode() != want) {
    throw ConfigError("family " + family_name(family.kind) + " requires " +
                      (multi_point ? "s_mode" : "two_point") + " kernels");
  }
  if (family.uses_zeta() && family.uses_three_point_zeta() != bundle.three_point_zeta()) {
    throw ConfigError("family " + family_name(family.kind) + " needs a " +
                      (family.uses_three_point_zeta() ? "three" : "two") +
                      "-point zeta; the bundle provides a " +
                      (bundle.three_point_zeta() ? "three" : "two") + "-point zeta");
  }
  if (!std::isfinite(family.s) || family.s < 1.0) {
    throw ConfigError("b-metric coefficient s must be finite and >= 1");
  }
}

// Fold state for one axiom. Indices are stream positions; the first failure
// in stream order becomes the witness.
struct Fold {
  AxiomResult result;
  bool has_worst = false;

  explicit Fold(AxiomName name, Coverage coverage, double initial) {
    result.name = name;
    result.coverage = coverage;
    result.worst = initial;
  }

  void fail(std::uint64_t index, std::vector<Point> tuple) {
    if (result.passed) {
      result.passed = false;
      result.witness = std::move(tuple);
      result.witness_index = index;
    }
  }

  // `better(candidate, current)` decides replacement of the worst value.
  template <class Better>
  void observe(double value, std::uint64_t index, const std::vector<Point>& tuple, Better better) {
    ++result.checked;
    if (!has_worst || better(value, result.worst)) {
      result.worst = value;
      has_worst = true;
      if (result.passed) {
        result.witness = tuple;
        result.witness_index = index;
      }
    }
  }
};

struct PairEval {
  double d_vw = 0, d_wv = 0, d_vv = 0;
};

struct RatioEval {
  double lhs = 0, coefficient = 1, sum = 0;
};

// ratio under the zero-denominator convention; NaN marks a skipped tuple.
double ratio_of(const RatioEval& e, double tol) {
  const double denom = e.coefficient * e.sum;
  if (denom > 0.0) return e.lhs / denom;
  if (e.lhs > tol) return kInf;
  return std::numeric_limits<double>::quiet_NaN();
}

bool ratio_violated(const RatioEval& e, double tol) {
  return e.lhs > e.coefficient * e.sum + tol;
}

// Folds the relaxed-inequality evaluations of a whole stream.
AxiomResult fold_ratios(const std::vector<RatioEval>& evals, const TupleSource& src,
                        Coverage coverage, double tol) {
  Fold fold(AxiomName::RelaxedTriangle, coverage, 0.0);
  std::optional<std::uint64_t> worst_index;
  for (std::uint64_t k = 0; k < evals.size(); ++k) {
    ++fold.result.checked;
    const double r = ratio_of(evals[k], tol);
    if (ratio_violated(evals[k], tol)) fold.fail(k, src[k]);
    if (std::isnan(r)) continue;
    if (!worst_index || r > fold.result.worst) {
      fold.result.worst = r;
      worst_index = k;
    }
  }
  if (fold.result.passed && worst_index) {
    fold.result.witness = src[*worst_index];
    fold.result.witness_index = *worst_index;
  }
  if (worst_index) {
    const double w = fold.result.worst;
    for (std::uint64_t k = 0; k < evals.size(); ++k) {
      const double r = ratio_of(evals[k], tol);
      if (std::isnan(r)) continue;
      const bool binds = std::isinf(w) ? std::isinf(r) : r >= w - tol;
      if (!binds) continue;
      ++fold.result.binding_count;
      if (fold.result.binding.size() < kMaxBinding) fold.result.binding.push_back(src[k]);
    }
  }
  return fold.result;
}

template <class T, class Eval>
std::vector<T> evaluate_stream(const TupleSource& src, unsigned workers, Eval eval) {
  std::vector<T> out(src.size());
  detail::parallel_for(src.size(), workers, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<Point> tuple(src.arity());
    for (std::uint64_t k = begin; k < end; ++k) {
      src.get(k, tuple);
      out[k] = eval(std::span<const Point>(tuple));
    }
  });
  return out;
}

}  // namespace

bool AxiomFamily::perturbed() const {
  switch (kind) {
    case FamilyKind::PerturbedMetric:
    case FamilyKind::PerturbedB:
    case FamilyKind::PerturbedExtendedB:
    case FamilyKind::PerturbedExtendedB3:
    case FamilyKind::PerturbedExtendedSb:
      return true;
    default:
      return false;
  }
}

bool AxiomFamily::multi_point() const {
  return kind == FamilyKind::SMetric || kind == FamilyKind::SbMetric ||
         kind == FamilyKind::ExtendedSb || kind == FamilyKind::PerturbedExtendedSb;
}

bool AxiomFamily::uses_zeta() const {
  return kind == FamilyKind::ExtendedB || kind == FamilyKind::PerturbedExtendedB ||
         uses_three_point_zeta();
}

bool AxiomFamily::uses_three_point_zeta() const {
  return kind == FamilyKind::ExtendedB3 || kind == FamilyKind::PerturbedExtendedB3 ||
         kind == FamilyKind::ExtendedSb || kind == FamilyKind::PerturbedExtendedSb;
}

std::string family_name(FamilyKind kind) {
  for (const auto& f : kFamilies) {
    if (f.kind == kind) return f.name;
  }
  return "unknown";
}

AxiomFamily parse_family(std::string_view name, double s) {
  for (const auto& f : kFamilies) {
    if (name != f.name) continue;
    const AxiomFamily family{f.kind, s};
    const bool constant = f.kind == FamilyKind::BMetric || f.kind == FamilyKind::PerturbedB ||
                          f.kind == FamilyKind::SbMetric;
    if (constant && !(s >= 1.0 && std::isfinite(s))) {
      throw ConfigError("coefficient s must be a finite number >= 1");
    }
    return family;
  }
  std::string known;
  for (const auto& f : kFamilies) known += std::string(known.empty() ? "" : ", ") + f.name;
  throw ConfigError("unknown axiom family '" + std::string(name) + "' (known: " + known + ")");
}

std::string axiom_name(AxiomName name) {
  switch (name) {
    case AxiomName::Identity: return "identity";
    case AxiomName::Positivity: return "positivity";
    case AxiomName::Symmetry: return "symmetry";
    case AxiomName::RelaxedTriangle: return "relaxed_triangle";
  }
  return "unknown";
}

bool AxiomReport::passed() const {
  for (const auto& a : axioms) {
    if (!a.passed) return false;
  }
  return true;
}

const AxiomResult& AxiomReport::axiom(AxiomName name) const {
  for (const auto& a : axioms) {
    if (a.name == name) return a;
  }
  throw ConfigError("axiom " + axiom_name(name) + " not part of this report");
}

AxiomReport check_axioms(const PointSpace& space, const KernelBundle& bundle,
                         const AxiomFamily& family, const CheckOptions& options) {
  validate(bundle, family, false);
  const Evaluator ev(bundle, family);
  const double tol = options.tol;
  const Coverage coverage = space.is_finite() ? Coverage::Exhaustive : Coverage::Statistical;
  const bool sampled = !space.is_finite();

  AxiomReport report;
  report.family = family;
  report.mode = Mode::TwoPoint;

  // Pair axioms. Sampled streams add the diagonal (v, v) of every pair.
  const TupleSource pairs(space, 2, options.budget, options.seed);
  const auto pair_evals = evaluate_stream<PairEval>(pairs, options.workers, [&](std::span<const Point> t) {
    PairEval e;
    e.d_vw = ev.d(t[0], t[1]);
    e.d_wv = ev.d(t[1], t[0]);
    if (sampled) e.d_vv = ev.d(t[0], t[0]);
    return e;
  });

  Fold positivity(AxiomName::Positivity, coverage, 0.0);
  Fold identity(AxiomName::Identity, coverage, 0.0);
  Fold symmetry(AxiomName::Symmetry, coverage, 0.0);
  auto less = [](double a, double b) { return a < b; };
  auto greater = [](double a, double b) { return a > b; };

  for (std::uint64_t k = 0; k < pair_evals.size(); ++k) {
    const PairEval& e = pair_evals[k];
    const std::vector<Point> t = pairs[k];
    const std::vector<Point> diag = {t[0], t[0]};
    const bool same = t[0] == t[1];

    positivity.observe(e.d_vw, k, t, less);
    if (e.d_vw < -tol) positivity.fail(k, t);
    if (sampled) {
      positivity.observe(e.d_vv, k, diag, less);
      if (e.d_vv < -tol) positivity.fail(k, diag);
    }

    if (same) {
      identity.observe(std::abs(e.d_vw), k, t, greater);
      if (std::abs(e.d_vw) > tol) identity.fail(k, t);
    } else {
      ++identity.result.checked;
      if (e.d_vw <= tol) identity.fail(k, t);
    }
    if (sampled) {
      identity.observe(std::abs(e.d_vv), k, diag, greater);
      if (std::abs(e.d_vv) > tol) identity.fail(k, diag);
    }

    const double asym = std::abs(e.d_vw - e.d_wv);
    symmetry.observe(asym, k, t, greater);
    if (asym > tol) symmetry.fail(k, t);
  }

  // Relaxed triangle over ordered triples.
  const TupleSource triples(space, 3, options.budget, options.seed);
  const auto tri = evaluate_stream<RatioEval>(triples, options.workers, [&](std::span<const Point> t) {
    RatioEval e;
    e.lhs = ev.d(t[0], t[2]);
    e.coefficient = ev.coefficient(t[0], t[1], t[2]);
    e.sum = ev.d(t[0], t[1]) + ev.d(t[1], t[2]);
    return e;
  });

  report.axioms = {positivity.result, identity.result, symmetry.result,
                   fold_ratios(tri, triples, coverage, tol)};
  return report;
}

AxiomReport check_sb_axioms(const PointSpace& space, const KernelBundle& bundle,
                            const AxiomFamily& family, const CheckOptions& options) {
  validate(bundle, family, true);
  const Evaluator ev(bundle, family);
  const double tol = options.tol;
  const Coverage coverage = space.is_finite() ? Coverage::Exhaustive : Coverage::Statistical;
  const bool sampled = !space.is_finite();

  AxiomReport report;
  report.family = family;
  report.mode = Mode::SMode;

  // Sampled streams also check (v, v, v) and (v, v, w) for each (v, w, z).
  const TupleSource triples(space, 3, options.budget, options.seed);
  struct TripleEval {
    double s = 0, s_vvv = 0, s_vvw = 0;
  };
  const auto evals = evaluate_stream<TripleEval>(triples, options.workers, [&](std::span<const Point> t) {
    TripleEval e;
    e.s = ev.s(t[0], t[1], t[2]);
    if (sampled) {
      e.s_vvv = ev.s(t[0], t[0], t[0]);
      e.s_vvw = ev.s(t[0], t[0], t[1]);
    }
    return e;
  });

  Fold positivity(AxiomName::Positivity, coverage, 0.0);
  Fold identity(AxiomName::Identity, coverage, 0.0);
  auto less = [](double a, double b) { return a < b; };
  auto greater = [](double a, double b) { return a > b; };

  auto check_one = [&](double s, std::uint64_t k, const std::vector<Point>& t) {
    positivity.observe(s, k, t, less);
    if (s < -tol) positivity.fail(k, t);
    if (t[0] == t[1] && t[1] == t[2]) {
      identity.observe(std::abs(s), k, t, greater);
      if (std::abs(s) > tol) identity.fail(k, t);
    } else {
      ++identity.result.checked;
      if (s <= tol) identity.fail(k, t);
    }
  };

  for (std::uint64_t k = 0; k < evals.size(); ++k) {
    const std::vector<Point> t = triples[k];
    check_one(evals[k].s, k, t);
    if (sampled) {
      check_one(evals[k].s_vvv, k, {t[0], t[0], t[0]});
      check_one(evals[k].s_vvw, k, {t[0], t[0], t[1]});
    }
  }

  const TupleSource quads(space, 4, options.budget, options.seed);
  const auto quad = evaluate_stream<RatioEval>(quads, options.workers, [&](std::span<const Point> t) {
    RatioEval e;
    e.lhs = ev.s(t[0], t[1], t[2]);
    e.coefficient = ev.coefficient(t[0], t[1], t[2]);
    e.sum = ev.s(t[0], t[0], t[3]) + ev.s(t[1], t[1], t[3]) + ev.s(t[2], t[2], t[3]);
    return e;
  });

  report.axioms = {positivity.result, identity.result, fold_ratios(quad, quads, coverage, tol)};
  return report;
}

AxiomReport run_family(const PointSpace& space, const KernelBundle& bundle,
                       const AxiomFamily& family, const CheckOptions& options) {
  return family.multi_point() ? check_sb_axioms(space, bundle, family, options)
                              : check_axioms(space, bundle, family, options);
}

bool violates(const KernelBundle& bundle, const AxiomFamily& family, AxiomName axiom,
              std::span<const Point> t, double tol) {
  const Evaluator ev(bundle, family);
  auto need = [&](std::size_t n) {
    if (t.size() != n) {
      throw ConfigError("axiom " + axiom_name(axiom) + " expects a tuple of " + std::to_string(n) +
                        " points");
    }
  };
  if (family.multi_point()) {
    switch (axiom) {
      case AxiomName::Positivity:
        need(3);
        return ev.s(t[0], t[1], t[2]) < -tol;
      case AxiomName::Identity: {
        need(3);
        const double s = ev.s(t[0], t[1], t[2]);
        return (t[0] == t[1] && t[1] == t[2]) ? std::abs(s) > tol : s <= tol;
      }
      case AxiomName::RelaxedTriangle: {
        need(4);
        RatioEval e;
        e.lhs = ev.s(t[0], t[1], t[2]);
        e.coefficient = ev.coefficient(t[0], t[1], t[2]);
        e.sum = ev.s(t[0], t[0], t[3]) + ev.s(t[1], t[1], t[3]) + ev.s(t[2], t[2], t[3]);
        return ratio_violated(e, tol);
      }
      case AxiomName::Symmetry:
        throw ConfigError("S-metric families have no symmetry axiom");
    }
    return false;
  }
  switch (axiom) {
    case AxiomName::Positivity:
      need(2);
      return ev.d(t[0], t[1]) < -tol;
    case AxiomName::Identity: {
      need(2);
      const double d = ev.d(t[0], t[1]);
      return t[0] == t[1] ? std::abs(d) > tol : d <= tol;
    }
    case AxiomName::Symmetry:
      need(2);
      return std::abs(ev.d(t[0], t[1]) - ev.d(t[1], t[0])) > tol;
    case AxiomName::RelaxedTriangle:
      need(3);
      return triangle_excess(bundle, family, t[0], t[1], t[2]) > tol;
  }
  return false;
}

double triangle_excess(const KernelBundle& bundle, const AxiomFamily& family, const Point& v,
                       const Point& w, const Point& z) {
  const Evaluator ev(bundle, family);
  return ev.d(v, z) - ev.coefficient(v, w, z) * (ev.d(v, w) + ev.d(w, z));
}

CoefficientResult minimal_b_coefficient(const PointSpace& space, const KernelBundle& bundle,
                                        const CheckOptions& options) {
  if (bundle.mode() != Mode::TwoPoint) throw ConfigError("minimal_b_coefficient needs two_point kernels");
  if (space.is_finite() && space.points().empty()) throw ConfigError("empty carrier");

  CoefficientResult out;
  out.exhaustive = space.is_finite();

  // Identity and symmetry are preconditions; report rather than refuse.
  {
    AxiomFamily metric{FamilyKind::PerturbedMetric, 1.0};
    const AxiomReport pre = check_axioms(space, bundle, metric, options);
    for (AxiomName a : {AxiomName::Identity, AxiomName::Symmetry}) {
      const auto& r = pre.axiom(a);
      if (!r.passed) {
        out.warnings.push_back(axiom_name(a) + " fails (witness " +
                               (r.witness.empty() ? std::string("-") : to_string(r.witness[0])) +
                               ", " + (r.witness.size() > 1 ? to_string(r.witness[1]) : "-") +
                               "); s_star is not a b-metric coefficient");
      }
    }
  }

  const TupleSource triples(space, 3, options.budget, options.seed);
  const double tol = options.tol;
  struct Eval {
    double lhs, sum;
  };
  const auto evals = evaluate_stream<Eval>(triples, options.workers, [&](std::span<const Point> t) {
    return Eval{exact_distance(bundle, t[0], t[2]),
                exact_distance(bundle, t[0], t[1]) + exact_distance(bundle, t[1], t[2])};
  });

  std::optional<std::uint64_t> best;
  for (std::uint64_t k = 0; k < evals.size(); ++k) {
    ++out.checked;
    const auto& e = evals[k];
    double r;
    if (e.sum > 0.0) {
      r = e.lhs / e.sum;
    } else if (e.lhs > tol) {
      r = kInf;
    } else {
      continue;
    }
    if (!best || r > out.s_star) {
      out.s_star = r;
      best = k;
    }
  }
  if (best) out.witness = triples[*best];
  out.unbounded = std::isinf(out.s_star);
  return out;
}

ContinuityResult continuity_probe(const KernelBundle& bundle, const Point& target,
                                  std::span<const Point> approach, const Point& probe, double tol) {
  if (approach.empty()) throw ConfigError("continuity_probe: empty approach sequence");
  double previous = kInf;
  for (std::size_t k = 0; k < approach.size(); ++k) {
    const double gap = exact_distance(bundle, approach[k], target);
    if (gap > previous + tol) {
      throw ConfigError("continuity_probe: d(approach_k, target) increases at k = " +
                        std::to_string(k) + "; the approach does not converge to the target");
    }
    previous = gap;
  }
  if (previous > tol) {
    throw ConfigError("continuity_probe: last approach point is still at distance " +
                      std::to_string(previous) + " from the target (needs <= tol)");
  }

  std::vector<double> f(approach.size());
  for (std::size_t k = 0; k < approach.size(); ++k) f[k] = exact_distance(bundle, approach[k], probe);

  ContinuityResult r;
  r.limit_along_approach = f.back();
  r.value_at_target = exact_distance(bundle, target, probe);
  r.richardson = f.back();
  const std::size_t n = f.size();
  if (n >= 3) {
    const double d1 = f[n - 1] - f[n - 2];
    const double d0 = f[n - 2] - f[n - 3];
    if (d1 - d0 != 0.0) r.richardson = f[n - 1] - d1 * d1 / (d1 - d0);
  }
  for (std::size_t k = n >= 3 ? n - 3 : 0; k < n; ++k) {
    r.tail_spread = std::max(r.tail_spread, std::abs(f[k] - f.back()));
  }
  r.discontinuous = std::abs(r.limit_along_approach - r.value_at_target) > 10.0 * tol;
  return r;
}

}  // namespace metriclab
