// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "metriclab/axioms.hpp"
#include "metriclab/cli.hpp"
#include "metriclab/config.hpp"
#include "metriclab/dsl.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/fixed_point.hpp"
#include "metriclab/gallery.hpp"
#include "metriclab/report.hpp"

using namespace metriclab;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok " : "FAILED ") + what);
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tuple(const std::vector<Point>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + to_string(t[i]);
  return s + ")";
}

CheckOptions options(std::uint64_t budget, std::uint64_t seed, unsigned workers = 4) {
  CheckOptions o;
  o.budget = budget;
  o.seed = seed;
  o.workers = workers;
  return o;
}

Kernel expr(const char* src, unsigned arity) {
  return Kernel::from_expression(std::make_shared<const dsl::Expr>(dsl::parse(src, arity)));
}

GalleryEntry lp4() {
  GalleryParams p;
  p.lp_dim = 4;
  p.lp_p = 0.5;
  return load_gallery("lp_perturbed", p);
}

// 1. {1,2,3} table
Outcome table123() {
  Outcome o;
  const GalleryEntry e = load_gallery("kamran123");
  auto d = [&](int a, int b) { return exact_distance(e.bundle, Point::label(a), Point::label(b)); };
  o.expect(d(1, 2) == 80 && d(2, 1) == 80, "d(1,2) = d(2,1) = 80");
  o.expect(d(2, 3) == 600 && d(3, 2) == 600, "d(2,3) = d(3,2) = 600");
  o.expect(d(1, 3) == 1000 && d(3, 1) == 1000, "d(1,3) = d(3,1) = 1000");
  bool zeta_ok = true;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) zeta_ok = zeta_ok && e.bundle.control(Point::label(a), Point::label(b)) == 1 + a + b;
  o.expect(zeta_ok, "zeta = 1 + v + w on all 9 pairs");

  const AxiomReport r = check_axioms(e.space, e.bundle, {FamilyKind::ExtendedB}, options(1, 0));
  const AxiomResult& tri = r.axiom(AxiomName::RelaxedTriangle);
  o.expect(r.passed(), "extended_b passes all four axioms");
  o.expect(tri.checked == 27 && tri.coverage == Coverage::Exhaustive, "27 ordered triples, exhaustive");

  const Point one = Point::label(1), two = Point::label(2), three = Point::label(3);
  const double lhs = d(1, 3), rhs = e.bundle.control(one, three) * (d(1, 2) + d(2, 3));
  const double margin = rhs - lhs;
  o.expect(rhs == 5.0 * (80 + 600) && lhs <= rhs + kTol && margin == 2400,
           "(1,2,3): " + num(lhs) + " <= " + num(rhs) + ", margin " + num(margin));
  o.expect(!violates(e.bundle, {FamilyKind::ExtendedB}, AxiomName::RelaxedTriangle, std::vector{one, two, three}),
           "(1,2,3) re-evaluated outside the engine");
  return o;
}

// 2. quartic {1..20}
Outcome quartic() {
  Outcome o;
  const GalleryEntry e = load_gallery("samreen_pow4");
  const AxiomReport r = check_axioms(e.space, e.bundle, {FamilyKind::ExtendedB}, options(1, 0));
  const AxiomResult& tri = r.axiom(AxiomName::RelaxedTriangle);
  o.expect(r.passed(), "extended_b passes");
  o.expect(tri.checked == 8000 && tri.coverage == Coverage::Exhaustive, "8000 ordered triples, exhaustive");
  o.expect(std::abs(tri.worst - 1.0) <= kTol, "worst_ratio = " + num(tri.worst));

  // independent oracle: every (v, v+1, v+2) binds with ratio exactly 1
  std::size_t reported = 0;
  for (int v = 1; v + 2 <= 20; ++v) {
    const double lhs = std::pow(2.0, 4), rhs = std::pow(2.0, 3) * (1 + 1);
    if (lhs != rhs) o.expect(false, "oracle arithmetic");
    const std::vector<Point> t = {Point::label(v), Point::label(v + 1), Point::label(v + 2)};
    if (std::find(tri.binding.begin(), tri.binding.end(), t) != tri.binding.end()) ++reported;
    const double ratio = exact_distance(e.bundle, t[0], t[2]) /
                         (e.bundle.control(t[0], t[2]) *
                          (exact_distance(e.bundle, t[0], t[1]) + exact_distance(e.bundle, t[1], t[2])));
    if (std::abs(ratio - 1.0) > kTol) o.expect(false, "ratio at " + tuple(t) + " = " + num(ratio));
  }
  o.expect(reported == 18, std::to_string(reported) + " of 18 triples (v, v+1, v+2) among the reported binding set (" +
                               std::to_string(tri.binding_count) + " binding in total)");
  return o;
}

// 3. N u {INF} {1..12}
Outcome nat_inf() {
  Outcome o;
  const GalleryEntry e = load_gallery("nawab_nat_inf");
  o.expect(e.space.points().size() == 13, "carrier {1..12} u {INF}");
  const CoefficientResult c = minimal_b_coefficient(e.space, e.bundle, options(1, 0));
  o.expect(c.exhaustive && c.checked == 13 * 13 * 13, "exhaustive over 2197 triples");
  o.expect(!c.unbounded && c.s_star <= 3.0 + kTol,
           "minimal coefficient <= 3: s* = " + num(c.s_star) + " at " + tuple(c.witness));

  std::vector<Point> approach;
  for (int k = 0; k <= 9; ++k) approach.push_back(Point::label(2 * std::pow(10.0, k)));
  const ContinuityResult r = continuity_probe(e.bundle, Point::infinity(), approach, Point::label(1));
  o.expect(r.discontinuous && r.limit_along_approach == 2.0 && r.value_at_target == 1.0,
           "even approach to INF probed at 1: limit " + num(r.limit_along_approach) + " vs value " +
               num(r.value_at_target));
  return o;
}

// 4. C([0,1]) on a 64-point grid
Outcome cab() {
  Outcome o;
  const GalleryEntry e = load_gallery("cab_perturbed");
  o.expect(e.space.dimension() == 64, "grid M = 64");
  const auto opt = options(200, 20240601);
  const AxiomReport p = check_axioms(e.space, e.bundle, {FamilyKind::PerturbedExtendedB}, opt);
  o.expect(p.passed() && p.axiom(AxiomName::RelaxedTriangle).coverage == Coverage::Statistical &&
               p.axiom(AxiomName::RelaxedTriangle).checked == 200,
           "perturbed_extended_b passes (statistical, 200 triples, worst " +
               num(p.axiom(AxiomName::RelaxedTriangle).worst) + ")");

  const AxiomReport d = check_axioms(e.space, e.bundle, {FamilyKind::ExtendedB}, opt);
  const AxiomResult& id = d.axiom(AxiomName::Identity);
  bool shape = !id.passed && id.witness.size() == 2 && id.witness[0] == id.witness[1];
  double sup = 0.0, D = 0.0;
  if (shape) {
    for (double c : id.witness[0].coords()) sup = std::max(sup, c * c);
    D = e.bundle.observed(id.witness[0], id.witness[0]);
  }
  o.expect(shape && sup > 0.0 && D == 2 * sup && D > 1e-6,
           "extended_b on D fails identity: D(v,v) = " + num(D) + " = 2 sup|v|^2");
  return o;
}

// The regression witness: first plain-triangle violation of the exact d found by
// check_axioms(perturbed_metric) on lp_perturbed (N = 4) with seed 20240601, budget 10000.
const std::vector<std::vector<double>> kLpWitness = {
    {-1.6561002380011609, 0.38087393616484455, 0.70345206768701152, -0.83388844560412068},
    {-1.6368354737614905, -0.49383171959211758, 1.06463949788722, 0.82878007013603616},
    {1.9526824261177707, -0.80953366387524461, 1.0333988402181258, 1.6077224958219407},
};

// 5. truncated l^1/2
Outcome lp() {
  Outcome o;
  const GalleryEntry e = lp4();
  const auto opt = options(10000, 20240601);
  const AxiomReport b = check_axioms(e.space, e.bundle, {FamilyKind::PerturbedB, 4.0}, opt);
  o.expect(b.passed() && b.axiom(AxiomName::RelaxedTriangle).checked == 10000,
           "perturbed_b(4) passes over 10000 triples (worst " + num(b.axiom(AxiomName::RelaxedTriangle).worst) + ")");
  o.expect(e.bundle.control_kernel().source() == num(std::pow(2.0, 1.0 / 0.5)), "s = 2^(1/p) = 4");

  const AxiomReport raw = check_axioms(e.space, e.bundle, {FamilyKind::BMetric, 4.0}, opt);
  o.expect(!raw.axiom(AxiomName::Identity).passed, "b_metric on D fails identity at " +
                                                        tuple(raw.axiom(AxiomName::Identity).witness));

  const AxiomReport plain = check_axioms(e.space, e.bundle, {FamilyKind::PerturbedMetric}, opt);
  const AxiomResult& tri = plain.axiom(AxiomName::RelaxedTriangle);
  o.expect(!tri.passed, "seeded search finds a plain-triangle violation of d at " + tuple(tri.witness));
  std::vector<Point> stored;
  for (const auto& c : kLpWitness) stored.push_back(Point::vector(c));
  o.expect(tri.witness == stored, "search reproduces the stored regression witness");
  o.expect(violates(e.bundle, {FamilyKind::PerturbedMetric}, AxiomName::RelaxedTriangle, stored),
           "stored witness still violates: excess " +
               num(triangle_excess(e.bundle, {FamilyKind::PerturbedMetric}, stored[0], stored[1], stored[2])));
  return o;
}

// 6. the theorem end to end on l^1/2 with T(v) = v / 32
Outcome theorem() {
  Outcome o;
  const GalleryEntry e = lp4();
  const SelfMap T = SelfMap::parse("x[i] / 32", e.space);
  const double bound = 1.0 / std::sqrt(32.0);

  const ContractionEstimate est = estimate_contraction(e.space, e.bundle, T, 10000, 20240601, kTol, 4);
  o.expect(est.c_hat <= bound + kTol, "sampled c_hat = " + num(est.c_hat) + " <= 32^-1/2");

  PicardOptions po;
  po.user_c = est.c_hat;
  const Point v0 = Point::vector({1, 1, 1, 1});
  const PicardTrace tr = picard_run(e.space, e.bundle, T, v0, po);
  const std::size_t steps = tr.steps_D.size();
  o.expect(tr.stop_reason == StopReason::Converged && steps <= 60,
           "stop_reason " + stop_reason_name(tr.stop_reason) + " after " + std::to_string(steps) + " iterations");
  bool closed_form = true;
  for (std::size_t n = 0; n < tr.iterates.size(); ++n) {
    const double c = 1.0 / std::pow(32.0, static_cast<double>(n));
    closed_form = closed_form && tr.iterates[n] == Point::vector({c, c, c, c});
  }
  o.expect(closed_form, "iterates equal v0 / 32^n");

  // c over a sample that contains every consecutive orbit pair
  const double c = tr.c_used;
  o.expect(c >= est.c_hat && c <= bound + kTol, "c_used = max(c_hat, orbit ratio) = " + num(c));
  const HypothesisCheck h = check_hypothesis(tr, e.bundle, c);
  o.expect(h.satisfied, "hypothesis: sup tail zeta " + num(h.sup_tail_zeta) + " < 1/c = " + num(h.threshold));

  const BoundEnvelope env = bound_envelope(tr, e.bundle, c);
  bool step_ok = true;
  for (std::size_t n = 0; n < steps; ++n) {
    step_ok = step_ok && tr.steps_D[n] <= std::pow(c, static_cast<double>(n)) * tr.Im + kTol;
  }
  o.expect(step_ok && check_step_bound(tr, env, kTol).holds(), "steps_D[n] <= c^n Im + 1e-9 for every n");

  const BoundCheck series = check_series_bound(tr, e.bundle, env, kTol);
  std::string where;
  if (series.first_violation) {
    const auto [n, m] = *series.first_violation;
    where = ", first (" + std::to_string(n) + ", " + std::to_string(m) + "): d = " +
            num(exact_distance(e.bundle, tr.iterates[n], tr.iterates[m])) + " vs " +
            num(tr.Im * (env.daleth[m - 1] - env.daleth[n]) + m * kTol);
  }
  o.expect(series.holds(), "d(v_n, v_m) <= Im (daleth_{m-1} - daleth_n) + m 1e-9 on all " +
                               std::to_string(series.checked) + " pairs: " + std::to_string(series.violations) +
                               " violations" + where);
  const BoundCheck chained = check_chained_bound(tr, e.bundle, c, kTol);
  o.notes.push_back("info chained form d(v_n, v_m) <= Im sum_{j=n}^{m-1} c^j prod zeta: " +
                    std::to_string(chained.violations) + " violations");

  const FixedPointVerdict v = verify_fixed_point(e.space, e.bundle, T, Point::vector({0, 0, 0, 0}), 1e-10);
  o.expect(v.is_fixed && v.residual_d <= 1e-10, "zero sequence: residual_d = " + num(v.residual_d));

  std::vector<Point> seeds;
  for (unsigned k = 0; k < 5; ++k) seeds.push_back(e.space.sample(99, k, 0));
  const UniquenessResult u = uniqueness_probe(e.space, e.bundle, T, seeds);
  double worst = 0.0;
  for (const auto& row : u.pairwise_d)
    for (double x : row) worst = std::max(worst, std::abs(x));
  o.expect(u.all_agree && worst <= 1e-8, "5 random seeds agree: max pairwise d = " + num(worst));
  return o;
}

// 7. the zero-perturbation reduction on samreen_pow4 with T = 1
Outcome corollary() {
  Outcome o;
  const GalleryEntry e = load_gallery("samreen_pow4");
  const KernelBundle b = e.bundle.without_perturbation();
  const SelfMap T = SelfMap::parse("1", e.space);
  const PicardTrace tr = picard_run(e.space, b, T, Point::label(17));
  o.expect(tr.stop_reason == StopReason::Converged && tr.iterates.back() == Point::label(1),
           "orbit 17 -> 1 converged in " + std::to_string(tr.steps_D.size()) + " steps");
  bool hbar_zero = true;
  for (std::size_t k = 0; k < tr.steps_D.size(); ++k) hbar_zero = hbar_zero && tr.steps_d[k] == tr.steps_D[k];
  o.expect(hbar_zero, "steps_d = steps_D along the orbit");
  const FixedPointVerdict v = verify_fixed_point(e.space, b, T, Point::label(1), 1e-10);
  o.expect(v.is_fixed && v.residual_d == 0.0, "fixed point 1 with residual " + num(v.residual_d));
  const ContractionEstimate est = estimate_contraction(e.space, b, T, 1, 0);
  const HypothesisCheck h = check_hypothesis(tr, b, tr.c_used);
  o.expect(est.c_hat == 0.0 && h.satisfied, "c_hat = 0, hypothesis satisfied (tail zeta " + num(h.sup_tail_zeta) + ")");
  const BoundEnvelope env = bound_envelope(tr, b, tr.c_used);
  o.expect(check_step_bound(tr, env, kTol).holds() && check_chained_bound(tr, b, tr.c_used, kTol).holds(),
           "step and chained bounds hold");
  return o;
}

// 8. S_b suite
Outcome sb() {
  Outcome o;
  std::vector<Point> pts;
  for (int v = 0; v <= 6; ++v) pts.push_back(Point::label(v));
  const auto space = PointSpace::finite(pts);
  const KernelBundle s(Mode::SMode, expr("abs(x - z) + abs(y - z)", 3), expr("0", 3), expr("1", 3));
  const AxiomReport r = check_sb_axioms(space, s, {FamilyKind::SMetric}, options(1, 0));
  o.expect(r.passed() && r.axiom(AxiomName::RelaxedTriangle).checked == 2401,
           "s_metric passes over 2401 quadruples");

  // independent brute force of the quadruple inequality
  bool oracle = true;
  auto S = [](int v, int w, int z) { return std::abs(v - z) + std::abs(w - z); };
  for (int v = 0; v <= 6; ++v)
    for (int w = 0; w <= 6; ++w)
      for (int z = 0; z <= 6; ++z)
        for (int t = 0; t <= 6; ++t) oracle = oracle && S(v, w, z) <= S(v, v, t) + S(w, w, t) + S(z, z, t);
  o.expect(oracle, "brute-force oracle agrees");

  const KernelBundle shifted(Mode::SMode, expr("abs(x - z) + abs(y - z) + (abs(x) + abs(y) + abs(z))", 3),
                             expr("abs(x) + abs(y) + abs(z)", 3), expr("1", 3));
  o.expect(check_sb_axioms(space, shifted, {FamilyKind::PerturbedExtendedSb}, options(1, 0)).passed(),
           "perturbed_extended_sb passes on S + hbar_S");
  const AxiomResult id =
      check_sb_axioms(space, shifted, {FamilyKind::ExtendedSb}, options(1, 0)).axiom(AxiomName::Identity);
  const bool shape = !id.passed && id.witness.size() == 3 && id.witness[0] == id.witness[1] &&
                     id.witness[1] == id.witness[2] && !(id.witness[0] == Point::label(0));
  o.expect(shape, "extended_sb fails axiom (i) with witness " + tuple(id.witness));
  return o;
}

bool same_report(const AxiomReport& a, const AxiomReport& b) {
  return to_json(a).dump() == to_json(b).dump();
}

// 9. meta-invariants on every gallery entry
Outcome meta() {
  Outcome o;
  for (const std::string& name : gallery_names()) {
    const GalleryEntry e = load_gallery(name);
    const auto opt = options(400, 7);
    bool hierarchy = true;
    for (bool perturbed : {false, true}) {
      const bool m =
          check_axioms(e.space, e.bundle, {perturbed ? FamilyKind::PerturbedMetric : FamilyKind::Metric}, opt).passed();
      for (double s : {1.0, 2.0, 3.0, 4.0, 10.0}) {
        const AxiomFamily bf{perturbed ? FamilyKind::PerturbedB : FamilyKind::BMetric, s};
        const bool bs = check_axioms(e.space, e.bundle, bf, opt).passed();
        hierarchy = hierarchy && (!m || bs);
        const auto wider = e.bundle.with_control(Kernel::constant(2, s * 1.5));
        const AxiomFamily ef{perturbed ? FamilyKind::PerturbedExtendedB : FamilyKind::ExtendedB};
        const bool es = check_axioms(e.space, wider, ef, opt).passed();
        hierarchy = hierarchy && (!bs || es);
        // constant zeta = s is the same check as the b-metric with coefficient s
        const AxiomReport as_ext = check_axioms(e.space, e.bundle.with_control(Kernel::constant(2, s)), ef, opt);
        AxiomReport as_b = check_axioms(e.space, e.bundle, bf, opt);
        as_b.family = as_ext.family;
        hierarchy = hierarchy && same_report(as_ext, as_b);
      }
    }
    o.expect(hierarchy, name + ": metric => b_metric(s) => extended_b(zeta >= s), constant zeta = b_metric");

    // three-point zeta that ignores the middle point
    const Kernel& z2 = e.bundle.control_kernel();
    const Kernel z3(
        3, [z2](std::span<const Point* const> a) { return z2(*a[0], *a[2]); }, z2.source());
    AxiomReport three = check_axioms(e.space, e.bundle.with_control(z3), {FamilyKind::ExtendedB3}, opt);
    AxiomReport two = check_axioms(e.space, e.bundle, {FamilyKind::ExtendedB}, opt);
    three.family = two.family;
    o.expect(same_report(three, two), name + ": extended_b3 with zeta(v,w,z) = zeta(v,z) equals extended_b");

    const AxiomFamily fam{FamilyKind::PerturbedExtendedB};
    const AxiomReport small = check_axioms(e.space, e.bundle, fam, options(100, 5));
    const AxiomReport big = check_axioms(e.space, e.bundle, fam, options(400, 5));
    bool prefix = !big.passed() || small.passed();
    for (std::size_t i = 0; i < big.axioms.size(); ++i) {
      const AxiomResult &a = small.axioms[i], &b = big.axioms[i];
      if (a.name == AxiomName::Positivity) {
        prefix = prefix && a.worst >= b.worst;
      } else {
        prefix = prefix && a.worst <= b.worst;
      }
      // a failure found at the small budget is the first failure at the large one
      if (!a.passed) prefix = prefix && b.witness == a.witness && b.witness_index == a.witness_index;
    }
    const TupleSource s100(e.space, 3, 100, 5), s400(e.space, 3, 400, 5);
    for (std::uint64_t k = 0; k < s100.size(); ++k) prefix = prefix && s100[k] == s400[k];
    o.expect(prefix, name + ": budget 100 is a prefix of budget 400");

    const auto run = [&](unsigned workers) {
      return to_json(check_axioms(e.space, e.bundle, fam, options(300, 11, workers))).dump();
    };
    const std::string first = run(1);
    o.expect(first == run(1) && first == run(3) && first == run(8), name + ": byte-identical across runs and workers");
  }
  return o;
}

std::vector<std::string> shell_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, any = false;
  for (char c : line) {
    if (c == '\'') {
      quoted = !quoted;
      any = true;
    } else if (c == ' ' && !quoted) {
      if (any || !cur.empty()) out.push_back(cur);
      cur.clear();
      any = false;
    } else {
      cur += c;
    }
  }
  if (any || !cur.empty()) out.push_back(cur);
  return out;
}

// 10. robustness
Outcome robustness() {
  Outcome o;
  std::mt19937_64 rng(1234567);
  const std::string alphabet = "xyzt0123456789.e+-*/^()[],<>=! abdfgilmnoprsuvINF_";
  const char* seeds[] = {
      "0 if x = y else (abs(1/x - 1/y) if x = INF or y = INF else (5 if even(x + 1) and even(y + 1) else 2))",
      "sum_i(abs(x[i] - y[i])^0.5)^2 + sum_i(abs(x[i])^0.5 + abs(y[i])^0.5)",
      "max_i((x[i] - y[i])^2) + max_i(x[i]^2 + y[i]^2)",
      "abs(x - y)^3 if x != y else 1",
      "min(x, y) / max(1, pow(2, -x)) - -3 ^ 2 ^ 0.5",
      "1 + x + y",
  };
  std::size_t parsed = 0, rejected = 0, evaluated = 0;
  bool unexpected = false;
  for (int k = 0; k < 100000; ++k) {
    std::string s;
    if (k % 2 == 0) {
      s.assign(rng() % 257, ' ');
      for (auto& c : s) c = rng() % 3 == 0 ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()];
    } else {
      // mutate a well-formed expression
      s = seeds[rng() % std::size(seeds)];
      for (int m = static_cast<int>(rng() % 4); m > 0 && !s.empty(); --m) {
        const std::size_t at = rng() % s.size();
        switch (rng() % 3) {
          case 0: s.erase(at, 1); break;
          case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
          default: s[at] = static_cast<char>(rng() % 256);
        }
      }
      s.resize(std::min<std::size_t>(s.size(), 256));
    }
    try {
      const dsl::Expr e = dsl::parse(s, 2);
      ++parsed;
      if (dsl::print(dsl::parse(dsl::print(e), 2)) != dsl::print(e)) unexpected = true;
      for (const auto& [x, y] : {std::pair{Point::label(3), Point::label(4)},
                                 std::pair{Point::vector({1, 2}), Point::vector({0.5, -2})}}) {
        try {
          e(x, y);
          ++evaluated;
        } catch (const EvaluationError&) {
        }
      }
    } catch (const ConfigError&) {
      ++rejected;
    } catch (...) {
      unexpected = true;
    }
  }
  o.expect(!unexpected && parsed + rejected == 100000,
           "100000 random inputs <= 256 bytes: " + std::to_string(parsed) + " parsed (" + std::to_string(evaluated) + " evaluated), " +
               std::to_string(rejected) + " rejected with ParseError/ArityError, no crash");

  const fs::path dir = fs::temp_directory_path() / "metriclab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto file = [&](const std::string& name, const std::string& text) {
    std::ofstream((dir / name).string()) << text;
    return (dir / name).string();
  };
  const std::string cab = file("cab.json", R"J({"gallery": "cab_perturbed"})J");
  const std::string div = file("div.json", R"J({"carrier": {"kind": "integers", "from": 0, "to": 3}, "D": "1 / (x - y)"})J");
  const std::string lp = file("lp.json", R"J({"gallery": "lp_perturbed", "dim": 4})J");
  const std::string bad = file("bad.txt", "(1 + 2\n");

  struct Case {
    std::vector<std::string> args;
    int code;
    bool witness;  // report or stderr must carry a reproducing witness
  };
  const std::vector<Case> cases = {
      {{"gallery", "run", "kamran123"}, kExitOk, false},
      {{"check-axioms", "--config", cab, "--family", "extended_b", "--budget", "200"}, kExitCheckFailed, true},
      {{"check-axioms", "--config", div, "--family", "metric"}, kExitEvaluation, true},
      {{"picard", "--config", lp, "--map", "x[i] + 1", "--v0", "[0, 0, 0, 0]"}, kExitCheckFailed, true},
      {{"picard", "--config", lp, "--map", "1 / (x[i] - 1)", "--v0", "[2, 2, 2, 2]"}, kExitEvaluation, true},
      {{"parse", bad}, kExitUsage, false},
      {{"check-axioms", "--config", cab}, kExitUsage, false},
      {{"check-axioms", "--config", (dir / "missing.json").string(), "--family", "metric"}, kExitUsage, false},
      {{"check-axioms", "--config", file("nan.json", R"J({"gallery": "lp_perturbed", "p": 1e999})J"), "--family",
        "metric"},
       kExitUsage, false},
      {{"bogus"}, kExitUsage, false},
  };
  for (const Case& c : cases) {
    std::ostringstream out, err;
    const int code = dispatch(c.args, out, err);
    std::string label = c.args[0] + (c.args.size() > 1 ? " " + c.args[1] : "");
    bool ok = code == c.code;
    if (c.code == kExitUsage && c.args[0] == "parse") ok = ok && err.str().find(":1:6:") != std::string::npos;
    if (c.witness) {
      const std::string e = err.str();
      const auto at = e.find("repro: ");
      ok = ok && at != std::string::npos;
      if (ok) {
        auto argv = shell_split(e.substr(at + 7, e.find('\n', at) - at - 7));
        argv.erase(argv.begin());
        std::ostringstream out2, err2;
        ok = ok && argv == c.args && dispatch(argv, out2, err2) == code;
        const bool named = e.find("witness") != std::string::npos || e.find("(0, 0)") != std::string::npos ||
                           out.str().find("\"stop_reason\"") != std::string::npos;
        ok = ok && named;
      }
    }
    o.expect(ok, label + " -> exit " + std::to_string(code) + " (expected " + std::to_string(c.code) + ")");
  }

  // arbitrary argument vectors never escape the exit-code contract
  const std::vector<std::string> words = {"check-axioms", "min-coefficient", "picard", "gallery", "run", "list",
                                          "parse", "--config", cab, div, bad, "--family", "metric", "sb_metric",
                                          "--budget", "-1", "0", "1e3", "--map", "x[i]", "--v0", "[1]", "--seed",
                                          "--out", (dir / "o.json").string(), "--workers", "--s", "nan", "kamran123",
                                          "", "--", "--arity", "9"};
  bool contract = true;
  for (int k = 0; k < 400; ++k) {
    std::vector<std::string> argv(rng() % 7);
    for (auto& w : argv) w = words[rng() % words.size()];
    std::ostringstream out, err;
    int code = -1;
    try {
      code = dispatch(argv, out, err);
    } catch (...) {
      code = -1;
    }
    contract = contract && code >= 0 && code <= 3;
  }
  o.expect(contract, "400 random argument vectors all exit with 0..3");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"{1,2,3} table exhaustive", table123},
      {"quartic {1..20} exhaustive", quartic},
      {"N u {INF} {1..12}", nat_inf},
      {"C([0,1]) perturbed, M = 64", cab},
      {"l^1/2 perturbed, N = 4", lp},
      {"contraction pipeline on l^1/2, T = v/32", theorem},
      {"zero perturbation, quartic, T = 1", corollary},
      {"S_b suite", sb},
      {"meta-invariants", meta},
      {"robustness", robustness},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "--only takes 1.." << criteria.size() << "\n";
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << criteria[i].first << " ("
              << ms << " ms)\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
  }
  return all ? 0 : 1;
}
