#include "metriclab/cli.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "metriclab/axioms.hpp"
#include "metriclab/config.hpp"
#include "metriclab/dsl.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/fixed_point.hpp"
#include "metriclab/gallery.hpp"
#include "metriclab/report.hpp"

namespace metriclab {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Series checks are quadratic in the trace length.
constexpr std::size_t kMaxSeriesIterates = 2048;

std::string quote(const std::string& a) {
  if (!a.empty() && a.find_first_of(" \t\"'\\$;&|<>()*?[]{}!#`") == std::string::npos) return a;
  std::string q = "'";
  for (char c : a) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

std::string repro_line(const std::vector<std::string>& args) {
  std::string s = "metriclab";
  for (const auto& a : args) s += " " + quote(a);
  return s;
}

json tuple_json(const std::vector<Point>& t) {
  json out = json::array();
  for (const Point& p : t) out.push_back(to_json(p));
  return out;
}

json reals(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(real_to_json(x));
  return out;
}

json bound_json(const BoundCheck& b) {
  json j = {{"status", b.holds() ? "pass" : "fail"},
            {"checked", b.checked},
            {"violations", b.violations},
            {"worst_excess", b.checked ? real_to_json(b.worst_excess) : json(nullptr)}};
  if (b.first_violation) j["first_violation"] = {b.first_violation->first, b.first_violation->second};
  return j;
}

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
  Clock::time_point start = Clock::now();

  std::int64_t elapsed() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  }

  void emit(json report, RunManifest manifest, const std::string& path) const {
    manifest.wall_ms = elapsed();
    report["manifest"] = to_json(manifest);
    report["wall_ms"] = manifest.wall_ms;
    report["repro"] = repro_line(args);
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
      out << text;
    } else {
      write_atomic(path, text);
    }
  }
};

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Point parse_point(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    // Bare INF is accepted as shorthand for the string "INF".
    if (text == "INF") return Point::infinity();
    throw ConfigError("--v0 is not a JSON point: " + text);
  }
  try {
    return point_from_json(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--v0: ") + e.what());
  }
}

struct AxiomArgs {
  std::string config, family, out;
  double s = 1.0;
  std::uint64_t budget = 10000, seed = 0;
  unsigned workers = default_workers();
};

int run_check_axioms(const Context& ctx, const AxiomArgs& a) {
  const LoadedSpace loaded = load_space(a.config);
  const AxiomFamily family = parse_family(a.family, a.s);
  CheckOptions o;
  o.budget = a.budget;
  o.seed = a.seed;
  o.workers = a.workers;
  const AxiomReport report = run_family(loaded.space, loaded.bundle, family, o);
  json j = to_json(report);
  j["command"] = "check-axioms";
  j["config_hash"] = loaded.content_hash;
  j["space"] = loaded.space.describe();
  j["kernels"] = loaded.bundle.describe();
  ctx.emit(std::move(j),
           {"check-axioms", loaded.content_hash, a.seed, a.budget, report.passed() ? "pass" : "fail", 0},
           a.out);
  if (!report.passed()) {
    for (const auto& ax : report.axioms) {
      if (!ax.passed) {
        ctx.err << "fail: " << axiom_name(ax.name) << " witness " << tuple_json(ax.witness).dump() << "\n";
      }
    }
    ctx.err << "repro: " << repro_line(ctx.args) << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int run_min_coefficient(const Context& ctx, const AxiomArgs& a, std::optional<double> expect_max) {
  const LoadedSpace loaded = load_space(a.config);
  CheckOptions o;
  o.budget = a.budget;
  o.seed = a.seed;
  o.workers = a.workers;
  const CoefficientResult r = minimal_b_coefficient(loaded.space, loaded.bundle, o);
  const bool ok = !expect_max || (!r.unbounded && r.s_star <= *expect_max + kAxiomTol);
  json j = to_json(r);
  j["command"] = "min-coefficient";
  j["config_hash"] = loaded.content_hash;
  if (expect_max) j["expect_max"] = *expect_max;
  ctx.emit(std::move(j), {"min-coefficient", loaded.content_hash, a.seed, a.budget, ok ? "pass" : "fail", 0},
           a.out);
  for (const auto& w : r.warnings) ctx.err << "warning: " << w << "\n";
  if (!ok) {
    ctx.err << "fail: s* = " << r.s_star << " exceeds " << *expect_max << " at "
            << tuple_json(r.witness).dump() << "\nrepro: " << repro_line(ctx.args) << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

struct PicardArgs {
  std::string config, map, v0, out, csv;
  double tol = 1e-10, tail = 0.5;
  std::uint64_t max_iter = 10000, budget = 10000, seed = 0;
  std::optional<double> c;
  unsigned workers = default_workers();
};

int run_picard(const Context& ctx, const PicardArgs& a) {
  const LoadedSpace loaded = load_space(a.config);
  const PointSpace& space = loaded.space;
  const KernelBundle& bundle = loaded.bundle;
  if (bundle.mode() != Mode::TwoPoint || bundle.three_point_zeta()) {
    throw ConfigError("picard needs two_point kernels with a two-point zeta");
  }
  if (a.c && !(*a.c >= 0.0 && *a.c < 1.0)) throw ConfigError("--c must be in [0, 1)");
  const SelfMap T = SelfMap::parse(a.map, space);
  const Point v0 = parse_point(a.v0);

  PicardOptions opt;
  opt.tol = a.tol;
  opt.max_iter = a.max_iter;
  opt.user_c = a.c;
  const PicardTrace trace = picard_run(space, bundle, T, v0, opt);

  json j;
  j["command"] = "picard";
  j["config_hash"] = loaded.content_hash;
  j["map"] = T.source();
  json iterates = json::array();
  for (const Point& p : trace.iterates) iterates.push_back(to_json(p));
  j["iterates"] = std::move(iterates);
  j["steps_D"] = reals(trace.steps_D);
  j["steps_d"] = reals(trace.steps_d);
  j["Im"] = real_to_json(trace.Im);
  j["c_used"] = real_to_json(trace.c_used);
  j["stop_reason"] = stop_reason_name(trace.stop_reason);
  if (!trace.error.empty()) j["error"] = trace.error;

  bool ok = trace.stop_reason == StopReason::Converged;
  try {
    const ContractionEstimate est = estimate_contraction(space, bundle, T, a.budget, a.seed, kAxiomTol, a.workers);
    j["contraction"] = {{"c_hat", real_to_json(est.c_hat)},
                        {"witness", tuple_json({est.witness.first, est.witness.second})},
                        {"checked", est.checked},
                        {"coverage", est.exhaustive ? "exhaustive" : "statistical"},
                        {"contractive", est.c_hat < 1.0}};
  } catch (const EvaluationError& e) {
    j["contraction"] = {{"error", e.what()}};
  }

  if (trace.steps_D.empty()) {
    ctx.emit(std::move(j), {"picard", loaded.content_hash, a.seed, a.budget, "fail", 0}, a.out);
    ctx.err << "fail: " << stop_reason_name(trace.stop_reason) << " " << trace.error
            << "\nrepro: " << repro_line(ctx.args) << "\n";
    return trace.stop_reason == StopReason::EvaluationError ? kExitEvaluation : kExitCheckFailed;
  }

  const HypothesisCheck h = check_hypothesis(trace, bundle, trace.c_used, a.tail);
  j["hypothesis"] = {{"sup_tail_zeta", real_to_json(h.sup_tail_zeta)},
                     {"threshold", real_to_json(h.threshold)},
                     {"satisfied", h.satisfied},
                     {"tail_pairs", h.tail_pairs.size()},
                     {"kind", "empirical"}};
  ok = ok && h.satisfied;

  const BoundEnvelope env = bound_envelope(trace, bundle, trace.c_used);
  j["envelope"] = {{"c", real_to_json(env.c)}, {"geometric", reals(env.geometric)}, {"daleth", reals(env.daleth)}};
  const BoundCheck step = check_step_bound(trace, env, kAxiomTol);
  j["step_bound"] = bound_json(step);
  ok = ok && step.holds();
  if (trace.iterates.size() <= kMaxSeriesIterates) {
    const BoundCheck chained = check_chained_bound(trace, bundle, trace.c_used, kAxiomTol);
    j["chained_bound"] = bound_json(chained);
    j["series_bound_literal"] = bound_json(check_series_bound(trace, bundle, env, kAxiomTol));
    ok = ok && chained.holds();
  } else {
    j["chained_bound"] = {{"status", "skipped"}};
    j["series_bound_literal"] = {{"status", "skipped"}};
  }
  if (trace.stop_reason != StopReason::EvaluationError) {
    j["continuity_gap"] = real_to_json(orbit_continuity_gap(trace, bundle, T, a.tail));
    const FixedPointVerdict v = verify_fixed_point(space, bundle, T, trace.iterates.back(), 10 * a.tol);
    j["fixed_point"] = {{"candidate", to_json(trace.iterates.back())},
                        {"residual_d", real_to_json(v.residual_d)},
                        {"residual_D_gap", real_to_json(v.residual_D_gap)},
                        {"is_fixed", v.is_fixed}};
    ok = ok && v.is_fixed;
  }

  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,step_D,step_d,geometric_n,daleth_n\n";
    for (std::size_t n = 0; n < trace.steps_D.size(); ++n) {
      csv << n << ',' << trace.steps_D[n] << ',' << trace.steps_d[n] << ',' << env.geometric[n] << ','
          << env.daleth[n] << '\n';
    }
    write_atomic(a.csv, csv.str());
  }

  ctx.emit(std::move(j), {"picard", loaded.content_hash, a.seed, a.budget, ok ? "pass" : "fail", 0}, a.out);
  if (trace.stop_reason == StopReason::EvaluationError) {
    ctx.err << "error: " << trace.error << "\nrepro: " << repro_line(ctx.args) << "\n";
    return kExitEvaluation;
  }
  if (!ok) {
    ctx.err << "fail: stop_reason " << stop_reason_name(trace.stop_reason) << "\nrepro: " << repro_line(ctx.args)
            << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int run_gallery_list(const Context& ctx) {
  for (const auto& name : gallery_names()) {
    const GalleryEntry e = load_gallery(name);
    ctx.out << name << "\t" << e.content_hash() << "\t" << e.provenance << "\n";
  }
  return kExitOk;
}

int run_gallery(const Context& ctx, const std::string& name, const std::string& path, unsigned workers) {
  const GalleryEntry e = load_gallery(name);
  const std::vector<FactOutcome> outcomes = run_facts(e, workers);
  bool ok = true;
  json facts = json::array();
  for (const auto& f : outcomes) {
    ok = ok && f.holds;
    ctx.out << (f.holds ? "PASS " : "FAIL ") << f.description << ": " << f.detail << "\n";
    facts.push_back({{"description", f.description}, {"holds", f.holds}, {"detail", f.detail}});
  }
  if (!path.empty()) {
    json j = {{"command", "gallery run"},
              {"name", name},
              {"version", kGalleryVersion},
              {"config_hash", e.content_hash()},
              {"facts", std::move(facts)}};
    ctx.emit(std::move(j), {"gallery run", e.content_hash(), 0, 0, ok ? "pass" : "fail", 0}, path);
  }
  if (!ok) {
    ctx.err << "repro: " << repro_line(ctx.args) << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int run_parse(const Context& ctx, const std::string& file, unsigned arity) {
  if (arity < 1 || arity > 4) throw ConfigError("--arity must be in 1..4");
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + file + "'");
  std::string line;
  int status = kExitOk;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      ctx.out << dsl::print(dsl::parse(line, arity)) << "\n";
    } catch (const dsl::ParseError& e) {
      ctx.err << file << ":" << lineno << ":" << e.offset() << ": " << e.what() << "\n";
      status = kExitUsage;
    } catch (const dsl::ArityError& e) {
      ctx.err << file << ":" << lineno << ":" << e.offset() << ": " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  return status;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{args, out, err};
  CLI::App app{"Perturbed extended b-metric toolkit", "metriclab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  AxiomArgs ax;
  auto* check = app.add_subcommand("check-axioms", "Check an axiom family on a space");
  check->add_option("--config", ax.config, "SpaceConfig JSON")->required();
  check->add_option("--family", ax.family, "Axiom family, e.g. perturbed_extended_b")->required();
  check->add_option("--s", ax.s, "Constant coefficient for b_metric, perturbed_b, sb_metric");
  check->add_option("--budget", ax.budget, "Sampled tuples (ignored on finite carriers)");
  check->add_option("--seed", ax.seed, "Sampling seed");
  check->add_option("--out", ax.out, "Report path (default stdout)");
  check->add_option("--workers", ax.workers, "Worker threads")->check(CLI::PositiveNumber);

  AxiomArgs mc;
  std::optional<double> expect_max;
  auto* minc = app.add_subcommand("min-coefficient", "Least constant s for the exact metric");
  minc->add_option("--config", mc.config, "SpaceConfig JSON")->required();
  minc->add_option("--budget", mc.budget, "Sampled triples");
  minc->add_option("--seed", mc.seed, "Sampling seed");
  minc->add_option("--out", mc.out, "Report path (default stdout)");
  minc->add_option("--workers", mc.workers, "Worker threads")->check(CLI::PositiveNumber);
  minc->add_option("--expect-max", expect_max, "Exit 1 when s* exceeds this value");

  PicardArgs pa;
  auto* picard = app.add_subcommand("picard", "Picard iteration with the contraction bounds");
  picard->add_option("--config", pa.config, "SpaceConfig JSON")->required();
  picard->add_option("--map", pa.map, "Self-map: one expression, or one per coordinate separated by ';'")
      ->required();
  picard->add_option("--v0", pa.v0, "Start point as JSON (number, \"INF\" or array)")->required();
  picard->add_option("--tol", pa.tol, "Stopping tolerance")->check(CLI::PositiveNumber);
  picard->add_option("--max-iter", pa.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  picard->add_option("--c", pa.c, "Contraction constant (c_used = max(c, orbit estimate))");
  picard->add_option("--tail", pa.tail, "Tail fraction for the hypothesis check");
  picard->add_option("--budget", pa.budget, "Pairs for the sampled contraction estimate");
  picard->add_option("--seed", pa.seed, "Sampling seed");
  picard->add_option("--out", pa.out, "Trace path (default stdout)");
  picard->add_option("--csv", pa.csv, "Per-iteration CSV path");
  picard->add_option("--workers", pa.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* gallery = app.add_subcommand("gallery", "Built-in example spaces");
  gallery->require_subcommand(1);
  gallery->add_subcommand("list", "List entries");
  std::string gname, gout;
  unsigned gworkers = default_workers();
  auto* grun = gallery->add_subcommand("run", "Run an entry's expected facts");
  grun->add_option("name", gname, "Entry name")->required();
  grun->add_option("--out", gout, "Report path");
  grun->add_option("--workers", gworkers, "Worker threads")->check(CLI::PositiveNumber);

  std::string pfile;
  unsigned parity = 2;
  auto* parse = app.add_subcommand("parse", "Print the canonical form of each expression line");
  parse->add_option("file", pfile, "Expression file")->required();
  parse->add_option("--arity", parity, "Variables in scope: 1..4 (x, y, z, t)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (check->parsed()) return run_check_axioms(ctx, ax);
    if (minc->parsed()) return run_min_coefficient(ctx, mc, expect_max);
    if (picard->parsed()) return run_picard(ctx, pa);
    if (gallery->parsed()) {
      if (grun->parsed()) return run_gallery(ctx, gname, gout, gworkers);
      return run_gallery_list(ctx);
    }
    if (parse->parsed()) return run_parse(ctx, pfile, parity);
  } catch (const dsl::ParseError& e) {
    err << "parse error at offset " << e.offset() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EvaluationError& e) {
    err << "evaluation error: " << e.what() << "\nrepro: " << repro_line(args) << "\n";
    return kExitEvaluation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\nrepro: " << repro_line(args) << "\n";
    return kExitEvaluation;
  }
  err << "usage error: no command\n";
  return kExitUsage;
}

}  // namespace metriclab
