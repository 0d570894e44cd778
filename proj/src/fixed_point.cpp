#include "metriclab/fixed_point.hpp"

#include <algorithm>
#include <cmath>

#include "metriclab/dsl.hpp"
#include "metriclab/errors.hpp"
#include "parallel.hpp"

namespace metriclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

std::size_t tail_start(std::size_t len, double tail_fraction) {
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len)));
  return len - std::clamp<std::size_t>(tail, std::min<std::size_t>(2, len), len);
}

}  // namespace

SelfMap::SelfMap(Fn fn, std::string source) : fn_(std::move(fn)), source_(std::move(source)) {}

SelfMap SelfMap::parse(std::string_view text, const PointSpace& space) {
  std::vector<std::shared_ptr<const dsl::Expr>> exprs;
  std::string source;
  for (std::string_view part : split(text, ';')) {
    if (part.empty()) throw ConfigError("map: empty coordinate expression");
    exprs.push_back(std::make_shared<const dsl::Expr>(dsl::parse(part, 1)));
    source += (source.empty() ? "" : "; ") + dsl::print(*exprs.back());
  }

  if (space.is_finite()) {
    if (exprs.size() != 1) throw ConfigError("map on a finite carrier takes a single expression");
    if (space.points().front().is_vector()) {
      const std::size_t dim = space.dimension();
      auto e = exprs.front();
      return SelfMap(
          [e, dim](const Point& v) {
            std::vector<double> out(dim);
            dsl::Bindings b;
            b.vars[0] = &v;
            for (std::size_t i = 0; i < dim; ++i) {
              b.index = i;
              out[i] = e->evaluate(b);
            }
            return Point::vector(std::move(out));
          },
          source);
    }
    auto e = exprs.front();
    return SelfMap([e](const Point& v) { return Point::label((*e)(v)); }, source);
  }

  const std::size_t dim = space.dimension();
  if (exprs.size() != 1 && exprs.size() != dim) {
    throw ConfigError("map has " + std::to_string(exprs.size()) +
                      " coordinate expressions; carrier dimension is " + std::to_string(dim));
  }
  return SelfMap(
      [exprs, dim](const Point& v) {
        std::vector<double> out(dim);
        dsl::Bindings b;
        b.vars[0] = &v;
        for (std::size_t i = 0; i < dim; ++i) {
          b.index = i;
          out[i] = exprs[exprs.size() == 1 ? 0 : i]->evaluate(b);
        }
        return Point::vector(std::move(out));
      },
      source);
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::NonContractive: return "non_contractive";
    case StopReason::Diverged: return "diverged";
    case StopReason::EvaluationError: return "evaluation_error";
  }
  return "unknown";
}

double orbit_contraction(const PicardTrace& trace, double tol) {
  double c = 0.0;
  for (std::size_t k = 0; k + 1 < trace.steps_D.size(); ++k) {
    if (trace.steps_D[k] > tol) c = std::max(c, trace.steps_D[k + 1] / trace.steps_D[k]);
  }
  return c;
}

PicardTrace picard_run(const PointSpace& space, const KernelBundle& bundle, const SelfMap& T,
                       const Point& v0, const PicardOptions& options) {
  if (options.max_iter < 1) throw ConfigError("picard: max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw ConfigError("picard: tol must be > 0");
  if (bundle.mode() != Mode::TwoPoint) throw ConfigError("picard: needs two_point kernels");
  if (!space.contains(v0)) throw ConfigError("picard: v0 = " + to_string(v0) + " is not in the carrier");

  PicardTrace trace;
  trace.iterates.push_back(v0);
  std::size_t rising = 0;

  auto converged_window = [&]() {
    const std::size_t len = trace.iterates.size();
    const std::size_t first = len > options.window ? len - options.window : 0;
    for (std::size_t i = first; i < len; ++i) {
      for (std::size_t j = i + 1; j < len; ++j) {
        if (exact_distance(bundle, trace.iterates[i], trace.iterates[j]) > 4.0 * options.tol) return false;
      }
    }
    return true;
  };

  try {
    for (std::uint64_t k = 0; k < options.max_iter; ++k) {
      const Point& current = trace.iterates.back();
      Point next = T(current);

      bool escaped = !space.contains(next);
      if (next.is_vector()) {
        for (double c : next.coords()) escaped = escaped || std::abs(c) > options.divergence_limit;
      }
      if (escaped) {
        trace.stop_reason = StopReason::Diverged;
        trace.error = "iterate " + std::to_string(k + 1) + " = " + to_string(next) + " left the carrier";
        break;
      }

      const double D = bundle.observed(current, next);
      const double d = D - bundle.perturbation(current, next);
      trace.iterates.push_back(std::move(next));
      trace.steps_D.push_back(D);
      trace.steps_d.push_back(d);
      if (k == 0) trace.Im = D;

      if (D > options.divergence_limit || std::abs(d) > options.divergence_limit) {
        trace.stop_reason = StopReason::Diverged;
        trace.error = "step " + std::to_string(k) + " exceeds the divergence limit";
        break;
      }
      if (d <= options.tol && converged_window()) {
        trace.stop_reason = StopReason::Converged;
        break;
      }
      rising = (k > 0 && D > trace.steps_D[k - 1]) ? rising + 1 : 0;
      if (rising >= options.window) {
        trace.stop_reason = StopReason::NonContractive;
        break;
      }
    }
  } catch (const EvaluationError& e) {
    trace.stop_reason = StopReason::EvaluationError;
    trace.error = e.what();
  }

  trace.c_used = orbit_contraction(trace);
  if (options.user_c) trace.c_used = std::max(trace.c_used, *options.user_c);
  return trace;
}

ContractionEstimate estimate_contraction(const PointSpace& space, const KernelBundle& bundle,
                                         const SelfMap& T, std::uint64_t budget,
                                         std::uint64_t seed, double tol, unsigned workers) {
  if (bundle.mode() != Mode::TwoPoint) throw ConfigError("estimate_contraction: needs two_point kernels");
  const TupleSource pairs(space, 2, budget, seed);
  std::vector<double> ratios(pairs.size(), -1.0);
  detail::parallel_for(pairs.size(), workers, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<Point> t(2);
    for (std::uint64_t k = begin; k < end; ++k) {
      pairs.get(k, t);
      const double D = bundle.observed(t[0], t[1]);
      if (D <= tol) continue;
      ratios[k] = bundle.observed(T(t[0]), T(t[1])) / D;
    }
  });

  ContractionEstimate out;
  out.exhaustive = space.is_finite();
  std::optional<std::uint64_t> best;
  for (std::uint64_t k = 0; k < ratios.size(); ++k) {
    if (ratios[k] < 0.0) continue;
    ++out.checked;
    if (!best || ratios[k] > out.c_hat) {
      out.c_hat = ratios[k];
      best = k;
    }
  }
  if (!best) {
    throw EvaluationError("NoUsablePairs: every sampled pair has D(v, w) <= tol");
  }
  const auto t = pairs[*best];
  out.witness = {t[0], t[1]};
  return out;
}

HypothesisCheck check_hypothesis(const PicardTrace& trace, const KernelBundle& bundle, double c,
                                 double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ConfigError("check_hypothesis: tail_fraction must be in (0, 1]");
  }
  if (!(c >= 0.0)) throw ConfigError("check_hypothesis: c must be >= 0");
  if (bundle.three_point_zeta()) throw ConfigError("check_hypothesis: needs a two-point zeta");
  if (trace.iterates.empty()) throw ConfigError("check_hypothesis: empty trace");

  HypothesisCheck h;
  h.threshold = c > 0.0 ? 1.0 / c : kInf;
  const std::size_t len = trace.iterates.size();
  const std::size_t first = tail_start(len, tail_fraction);
  bool any = false;
  for (std::size_t n = first; n < len; ++n) {
    for (std::size_t m = n + 1; m < len; ++m) {
      const double z = bundle.control(trace.iterates[n], trace.iterates[m]);
      h.tail_pairs.push_back({n, m, z});
      h.sup_tail_zeta = any ? std::max(h.sup_tail_zeta, z) : z;
      any = true;
    }
  }
  if (!any) {
    const double z = bundle.control(trace.iterates[first], trace.iterates[first]);
    h.tail_pairs.push_back({first, first, z});
    h.sup_tail_zeta = z;
  }
  h.satisfied = h.sup_tail_zeta < h.threshold - kHypothesisMargin;
  return h;
}

BoundEnvelope bound_envelope(const PicardTrace& trace, const KernelBundle& bundle, double c) {
  BoundEnvelope env;
  env.c = c;
  double g = trace.Im;
  for (std::size_t n = 0; n < trace.steps_D.size(); ++n) {
    env.geometric.push_back(g);
    g *= c;
  }
  if (trace.iterates.empty()) return env;
  const std::size_t M = trace.iterates.size() - 1;
  const Point& last = trace.iterates[M];
  env.daleth.assign(M + 1, 0.0);
  double term = 1.0;  // c^j prod_{i=1..j} zeta(v_i, v_M)
  for (std::size_t j = 1; j <= M; ++j) {
    term *= c * bundle.control(trace.iterates[j], last);
    env.daleth[j] = env.daleth[j - 1] + term;
  }
  return env;
}

BoundCheck check_step_bound(const PicardTrace& trace, const BoundEnvelope& envelope, double tol) {
  BoundCheck out;
  for (std::size_t n = 0; n < trace.steps_D.size() && n < envelope.geometric.size(); ++n) {
    for (double step : {trace.steps_D[n], trace.steps_d[n]}) {
      ++out.checked;
      const double excess = step - envelope.geometric[n];
      out.worst_excess = std::max(out.worst_excess, excess);
      if (excess > tol) {
        ++out.violations;
        if (!out.first_violation) out.first_violation = std::pair{n, n + 1};
      }
    }
  }
  return out;
}

BoundCheck check_series_bound(const PicardTrace& trace, const KernelBundle& bundle,
                              const BoundEnvelope& envelope, double tol) {
  BoundCheck out;
  const std::size_t len = std::min(trace.iterates.size(), envelope.daleth.size());
  for (std::size_t m = 1; m < len; ++m) {
    for (std::size_t n = 0; n < m; ++n) {
      ++out.checked;
      const double lhs = exact_distance(bundle, trace.iterates[n], trace.iterates[m]);
      const double rhs = trace.Im * (envelope.daleth[m - 1] - envelope.daleth[n]);
      const double excess = lhs - rhs;
      out.worst_excess = std::max(out.worst_excess, excess);
      if (excess > static_cast<double>(m) * tol) {
        ++out.violations;
        if (!out.first_violation) out.first_violation = std::pair{n, m};
      }
    }
  }
  return out;
}

BoundCheck check_chained_bound(const PicardTrace& trace, const KernelBundle& bundle, double c,
                               double tol) {
  BoundCheck out;
  const std::size_t len = trace.iterates.size();
  for (std::size_t m = 1; m < len; ++m) {
    // tail[n] = sum_{j=n}^{m-1} c^j prod_{i=n}^{j} zeta(v_i, v_m), built from n = m-1 down.
    double tail = 0.0;
    std::vector<double> bound(m);
    for (std::size_t n = m; n-- > 0;) {
      tail = bundle.control(trace.iterates[n], trace.iterates[m]) *
             (std::pow(c, static_cast<double>(n)) + tail);
      bound[n] = trace.Im * tail;
    }
    for (std::size_t n = 0; n < m; ++n) {
      ++out.checked;
      const double excess = exact_distance(bundle, trace.iterates[n], trace.iterates[m]) - bound[n];
      out.worst_excess = std::max(out.worst_excess, excess);
      if (excess > static_cast<double>(m) * tol) {
        ++out.violations;
        if (!out.first_violation) out.first_violation = std::pair{n, m};
      }
    }
  }
  return out;
}

double orbit_continuity_gap(const PicardTrace& trace, const KernelBundle& bundle, const SelfMap& T,
                            double tail_fraction) {
  if (trace.iterates.size() < 2) return 0.0;
  const Point t_theta = T(trace.iterates.back());
  const std::size_t len = trace.iterates.size();
  double gap = 0.0;
  for (std::size_t n = tail_start(len - 1, tail_fraction); n + 1 < len; ++n) {
    gap = std::max(gap, std::abs(exact_distance(bundle, trace.iterates[n + 1], t_theta)));
  }
  return gap;
}

FixedPointVerdict verify_fixed_point(const PointSpace& space, const KernelBundle& bundle,
                                     const SelfMap& T, const Point& candidate, double tol) {
  if (!space.contains(candidate)) {
    throw ConfigError("verify_fixed_point: candidate " + to_string(candidate) + " is not in the carrier");
  }
  const Point image = T(candidate);
  FixedPointVerdict v;
  v.residual_d = exact_distance(bundle, image, candidate);
  v.residual_D_gap = bundle.observed_kernel()(image, candidate) -
                     bundle.perturbation_kernel()(image, candidate);
  v.is_fixed = v.residual_d <= tol && approx_equal(image, candidate, tol) &&
               std::abs(v.residual_d - v.residual_D_gap) <= 1e-12;
  return v;
}

UniquenessResult uniqueness_probe(const PointSpace& space, const KernelBundle& bundle,
                                  const SelfMap& T, std::span<const Point> seeds,
                                  const PicardOptions& options) {
  if (seeds.size() < 2) throw ConfigError("uniqueness_probe: needs at least two seeds");
  UniquenessResult out;
  for (const Point& s : seeds) {
    const PicardTrace trace = picard_run(space, bundle, T, s, options);
    out.limits.push_back(trace.iterates.back());
    out.stop_reasons.push_back(trace.stop_reason);
  }
  const std::size_t n = seeds.size();
  out.pairwise_d.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.pairwise_d[i][j] = exact_distance(bundle, out.limits[i], out.limits[j]);
    }
  }
  for (std::size_t i = 0; i < n && !out.failing_seed; ++i) {
    if (out.stop_reasons[i] != StopReason::Converged) out.failing_seed = i;
  }
  for (std::size_t i = 0; i < n && !out.failing_seed; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(out.pairwise_d[i][j]) > 10.0 * options.tol) {
        out.failing_seed = i;
        break;
      }
    }
  }
  out.all_agree = !out.failing_seed;
  return out;
}

}  // namespace metriclab
