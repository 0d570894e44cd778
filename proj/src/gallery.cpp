#include "metriclab/gallery.hpp"

#include <cmath>
#include <sstream>

#include "metriclab/axioms.hpp"
#include "metriclab/dsl.hpp"
#include "metriclab/errors.hpp"

namespace metriclab {

namespace {

Kernel expr_kernel(std::string_view source, unsigned arity) {
  return Kernel::from_expression(std::make_shared<const dsl::Expr>(dsl::parse(source, arity)));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string tuple_text(const std::vector<Point>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + to_string(t[i]);
  return s + ")";
}

CheckOptions opts(std::uint64_t budget, std::uint64_t seed, unsigned workers) {
  CheckOptions o;
  o.budget = budget;
  o.seed = seed;
  o.workers = workers;
  return o;
}

// "family passes" / "family fails <axiom>" as facts.
Fact family_passes(AxiomFamily family, std::uint64_t budget, std::uint64_t seed) {
  std::string text = family_name(family.kind) + " passes";
  return {text, [=](const GalleryEntry& e, unsigned workers) {
            const AxiomReport r = run_family(e.space, e.bundle, family, opts(budget, seed, workers));
            FactOutcome out{text, r.passed(), ""};
            for (const auto& a : r.axioms) {
              out.detail += axiom_name(a.name) + (a.passed ? " pass" : " FAIL") + " (" +
                            std::to_string(a.checked) + ", worst " + fmt(a.worst) + ")";
              if (!a.passed) out.detail += " witness " + tuple_text(a.witness);
              out.detail += "; ";
            }
            return out;
          }};
}

Fact family_fails(AxiomFamily family, AxiomName axiom, std::uint64_t budget, std::uint64_t seed,
                  std::function<bool(const GalleryEntry&, const AxiomResult&)> witness_ok = {}) {
  std::string text = family_name(family.kind) + " fails " + axiom_name(axiom);
  return {text, [=](const GalleryEntry& e, unsigned workers) {
            const AxiomReport r = run_family(e.space, e.bundle, family, opts(budget, seed, workers));
            const AxiomResult& a = r.axiom(axiom);
            FactOutcome out{text, !a.passed, ""};
            if (a.passed) {
              out.detail = "no violation in " + std::to_string(a.checked) + " tuples";
              return out;
            }
            out.detail = "witness " + tuple_text(a.witness) + ", worst " + fmt(a.worst);
            if (witness_ok && !witness_ok(e, a)) {
              out.holds = false;
              out.detail += " (witness does not have the expected shape)";
            }
            return out;
          }};
}

GalleryEntry table123(const GalleryParams&) {
  auto space = PointSpace::finite({Point::label(1), Point::label(2), Point::label(3)});
  KernelBundle bundle(Mode::TwoPoint,
                      expr_kernel("0 if x = y else (80 if x + y = 3 else (1000 if x + y = 4 else 600))", 2),
                      Kernel::constant(2, 0.0), expr_kernel("1 + x + y", 2));
  std::vector<Fact> facts;
  facts.push_back(family_passes({FamilyKind::ExtendedB}, 1, 0));
  facts.push_back({"triple (1,2,3): d(1,3) <= zeta(1,3) (d(1,2) + d(2,3)) with margin 2400",
                   [](const GalleryEntry& e, unsigned) {
                     const Point a = Point::label(1), b = Point::label(2), c = Point::label(3);
                     const double lhs = exact_distance(e.bundle, a, c);
                     const double rhs = e.bundle.control(a, c) *
                                        (exact_distance(e.bundle, a, b) + exact_distance(e.bundle, b, c));
                     return FactOutcome{"table triple margin", lhs == 1000 && rhs == 3400,
                                        fmt(lhs) + " <= " + fmt(rhs) + ", margin " + fmt(rhs - lhs)};
                   }});
  return {"kamran123", "{1,2,3} table with zeta = 1 + v + w", std::move(space),
          std::move(bundle), std::move(facts)};
}

GalleryEntry quartic(const GalleryParams& p) {
  if (p.quartic_max < 1) throw ConfigError("samreen_pow4: range must be >= 1");
  std::vector<Point> pts;
  for (int v = 1; v <= p.quartic_max; ++v) pts.push_back(Point::label(v));
  auto space = PointSpace::finite(std::move(pts));
  KernelBundle bundle(Mode::TwoPoint, expr_kernel("(x - y)^4", 2), Kernel::constant(2, 0.0),
                      expr_kernel("abs(x - y)^3 if x != y else 1", 2));
  std::vector<Fact> facts;
  facts.push_back(family_passes({FamilyKind::ExtendedB}, 1, 0));
  facts.push_back({"relaxed triangle binds with ratio 1 on (v, v+1, v+2)",
                   [](const GalleryEntry& e, unsigned workers) {
                     const AxiomReport r = check_axioms(e.space, e.bundle, {FamilyKind::ExtendedB},
                                                        opts(1, 0, workers));
                     const AxiomResult& a = r.axiom(AxiomName::RelaxedTriangle);
                     bool found = false;
                     for (const auto& t : a.binding) {
                       found = found || (t[1].value() == t[0].value() + 1 && t[2].value() == t[0].value() + 2);
                     }
                     return FactOutcome{"quartic binding", std::abs(a.worst - 1.0) <= 1e-9 && found,
                                        "worst " + fmt(a.worst) + ", " + std::to_string(a.binding_count) +
                                            " binding triples"};
                   }});
  return {"samreen_pow4", "(v - w)^4 with zeta = |v - w|^3 off the diagonal", std::move(space),
          std::move(bundle), std::move(facts)};
}

GalleryEntry nat_inf(const GalleryParams& p) {
  if (p.inf_k < 1) throw ConfigError("nawab_nat_inf: K must be >= 1");
  std::vector<Point> pts;
  for (int v = 1; v <= 2 * p.inf_k; ++v) pts.push_back(Point::label(v));
  pts.push_back(Point::infinity());
  auto space = PointSpace::finite(std::move(pts));
  KernelBundle bundle(
      Mode::TwoPoint,
      expr_kernel("0 if x = y else (abs(1/x - 1/y) if x = INF or y = INF else "
                  "(abs(1/x - 1/y) if even(x) and even(y) else "
                  "(5 if even(x + 1) and even(y + 1) else 2)))",
                  2),
      Kernel::constant(2, 0.0), Kernel::constant(2, 3.0));
  std::vector<Fact> facts;
  facts.push_back(family_passes({FamilyKind::BMetric, 3.0}, 1, 0));
  facts.push_back({"minimal b coefficient <= 3", [](const GalleryEntry& e, unsigned workers) {
                     const CoefficientResult c = minimal_b_coefficient(e.space, e.bundle, opts(1, 0, workers));
                     return FactOutcome{"nat_inf coefficient", !c.unbounded && c.s_star <= 3.0 + 1e-9,
                                        "s* = " + fmt(c.s_star) + " at " + tuple_text(c.witness)};
                   }});
  facts.push_back({"d is discontinuous at INF: evens -> INF, probe 1, limit 2 vs value 1",
                   [](const GalleryEntry& e, unsigned) {
                     std::vector<Point> approach;
                     for (int k = 0; k <= 9; ++k) approach.push_back(Point::label(2 * std::pow(10.0, k)));
                     const ContinuityResult r =
                         continuity_probe(e.bundle, Point::infinity(), approach, Point::label(1));
                     return FactOutcome{"nat_inf continuity",
                                        r.discontinuous && r.limit_along_approach == 2 && r.value_at_target == 1,
                                        "limit " + fmt(r.limit_along_approach) + ", value " + fmt(r.value_at_target)};
                   }});
  return {"nawab_nat_inf", "N u {INF} piecewise kernel with coefficient 3", std::move(space),
          std::move(bundle), std::move(facts)};
}

GalleryEntry cab(const GalleryParams& p) {
  if (p.cab_grid < 1) throw ConfigError("cab_perturbed: grid must be >= 1");
  if (!(p.cab_zeta >= 1.0) || !std::isfinite(p.cab_zeta)) throw ConfigError("cab_perturbed: zeta must be >= 1");
  auto space = PointSpace::sampled(p.cab_grid, {-1.0}, {1.0}, p.seed);
  KernelBundle bundle(Mode::TwoPoint,
                      expr_kernel("max_i((x[i] - y[i])^2) + max_i(x[i]^2 + y[i]^2)", 2),
                      expr_kernel("max_i(x[i]^2 + y[i]^2)", 2), Kernel::constant(2, p.cab_zeta));
  const std::uint64_t seed = p.seed;
  std::vector<Fact> facts;
  facts.push_back(family_passes({FamilyKind::PerturbedExtendedB}, 200, seed));
  facts.push_back(family_fails({FamilyKind::ExtendedB}, AxiomName::Identity, 200, seed,
                               [](const GalleryEntry& e, const AxiomResult& a) {
                                 const Point& v = a.witness.at(0);
                                 double sup = 0.0;
                                 for (double c : v.coords()) sup = std::max(sup, c * c);
                                 const double D = e.bundle.observed(v, v);
                                 return a.witness.size() == 2 && a.witness[0] == a.witness[1] &&
                                        sup > 0.0 && D == 2 * sup && D > 1e-6;
                               }));
  return {"cab_perturbed", "C([0,1]) on a uniform grid, sup-norm kernel perturbed by sup(|v|^2 + |w|^2)",
          std::move(space), std::move(bundle), std::move(facts)};
}

GalleryEntry lp(const GalleryParams& p) {
  if (p.lp_dim < 1) throw ConfigError("lp_perturbed: dim must be >= 1");
  if (!(p.lp_p > 0.0 && p.lp_p <= 1.0)) throw ConfigError("lp_perturbed: p must be in (0, 1]");
  auto space = PointSpace::sampled(p.lp_dim, {-2.0}, {2.0}, p.seed);
  const std::string pp = fmt(p.lp_p), inv = fmt(1.0 / p.lp_p);
  const double s = std::pow(2.0, 1.0 / p.lp_p);
  KernelBundle bundle(
      Mode::TwoPoint,
      expr_kernel("sum_i(abs(x[i] - y[i])^" + pp + ")^" + inv + " + sum_i(abs(x[i])^" + pp +
                      " + abs(y[i])^" + pp + ")",
                  2),
      expr_kernel("sum_i(abs(x[i])^" + pp + " + abs(y[i])^" + pp + ")", 2), Kernel::constant(2, s));
  const std::uint64_t seed = p.seed;
  const std::size_t dim = p.lp_dim;
  std::vector<Fact> facts;
  facts.push_back(family_passes({FamilyKind::PerturbedB, s}, 10000, seed));
  facts.push_back(family_fails({FamilyKind::BMetric, s}, AxiomName::Identity, 10000, seed));
  facts.push_back(family_fails({FamilyKind::PerturbedMetric}, AxiomName::RelaxedTriangle, 10000, seed));
  facts.push_back({"exact d breaks the plain triangle on (e1, 0, e2)",
                   [dim](const GalleryEntry& e, unsigned) {
                     std::vector<double> a(dim, 0.0), b(dim, 0.0), zero(dim, 0.0);
                     a[0] = 1.0;
                     if (dim > 1) b[1] = 1.0;
                     const std::vector<Point> t = {Point::vector(a), Point::vector(zero), Point::vector(b)};
                     const bool bad = violates(e.bundle, {FamilyKind::PerturbedMetric},
                                               AxiomName::RelaxedTriangle, t);
                     return FactOutcome{"lp regression witness", bad,
                                        "excess " + fmt(triangle_excess(e.bundle, {FamilyKind::PerturbedMetric},
                                                                        t[0], t[1], t[2]))};
                   }});
  return {"lp_perturbed", "truncated l^p quasi-norm kernel perturbed by sum(|v|^p + |w|^p)",
          std::move(space), std::move(bundle), std::move(facts)};
}

}  // namespace

std::string GalleryEntry::content_hash() const {
  std::string text(kGalleryVersion);
  text += "\n" + name + "\n" + space.describe() + "\n" + bundle.describe();
  return metriclab::content_hash(text);
}

std::vector<std::string> gallery_names() {
  return {"nawab_nat_inf", "kamran123", "samreen_pow4", "cab_perturbed", "lp_perturbed"};
}

GalleryEntry load_gallery(std::string_view name, const GalleryParams& params) {
  if (name == "nawab_nat_inf") return nat_inf(params);
  if (name == "kamran123") return table123(params);
  if (name == "samreen_pow4") return quartic(params);
  if (name == "cab_perturbed") return cab(params);
  if (name == "lp_perturbed") return lp(params);
  throw ConfigError("unknown gallery entry '" + std::string(name) + "'");
}

std::vector<FactOutcome> run_facts(const GalleryEntry& entry, unsigned workers) {
  std::vector<FactOutcome> out;
  for (const Fact& f : entry.expected) {
    FactOutcome o = f.check(entry, workers);
    o.description = f.description;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace metriclab
