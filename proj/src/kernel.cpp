#include "metriclab/kernel.hpp"

#include <cmath>

#include "metriclab/errors.hpp"

namespace metriclab {

namespace {

std::string tuple_text(std::span<const Point* const> args) {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += to_string(*args[i]);
  }
  return s + ")";
}

}  // namespace

Kernel::Kernel(unsigned arity, Fn fn, std::string source)
    : arity_(arity), fn_(std::move(fn)), source_(std::move(source)) {}

Kernel Kernel::constant(unsigned arity, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return Kernel(arity, [value](std::span<const Point* const>) { return value; }, buf);
}

Kernel Kernel::from_expression(std::shared_ptr<const dsl::Expr> expr) {
  const unsigned arity = expr->arity();
  std::string source = dsl::print(*expr);
  return Kernel(
      arity,
      [expr = std::move(expr)](std::span<const Point* const> args) {
        dsl::Bindings b;
        for (std::size_t i = 0; i < args.size() && i < b.vars.size(); ++i) b.vars[i] = args[i];
        return expr->evaluate(b);
      },
      std::move(source));
}

double Kernel::operator()(std::span<const Point* const> args) const {
  if (args.size() != arity_) {
    throw EvaluationError("kernel '" + source_ + "' of arity " + std::to_string(arity_) +
                          " called with " + std::to_string(args.size()) + " points");
  }
  try {
    return fn_(args);
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string(e.what()) + " evaluating '" + source_ + "' at " +
                          tuple_text(args));
  }
}

double Kernel::operator()(const Point& a, const Point& b) const {
  const Point* args[] = {&a, &b};
  return (*this)(std::span<const Point* const>(args));
}

double Kernel::operator()(const Point& a, const Point& b, const Point& c) const {
  const Point* args[] = {&a, &b, &c};
  return (*this)(std::span<const Point* const>(args));
}

KernelBundle::KernelBundle(Mode mode, Kernel observed, Kernel perturbation, Kernel control)
    : mode_(mode),
      observed_(std::move(observed)),
      perturbation_(std::move(perturbation)),
      control_(std::move(control)) {
  const unsigned arity = mode == Mode::TwoPoint ? 2 : 3;
  if (observed_.arity() != arity || perturbation_.arity() != arity) {
    throw ConfigError("D and hbar must take " + std::to_string(arity) + " points in this mode");
  }
  if (control_.arity() != 2 && control_.arity() != 3) {
    throw ConfigError("zeta must take 2 or 3 points");
  }
  if (mode == Mode::SMode && control_.arity() != 3) {
    throw ConfigError("S-mode requires a three-point zeta");
  }
}

namespace {

double checked(double v, double floor, const char* what, std::span<const Point* const> args) {
  if (!std::isfinite(v) || v < floor) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    throw EvaluationError(std::string(what) + " returned " + buf + " at " + tuple_text(args) +
                          (floor == 0.0 ? "; must be finite and >= 0" : "; must be finite and >= 1"));
  }
  return v;
}

}  // namespace

double KernelBundle::observed(const Point& v, const Point& w) const {
  const Point* args[] = {&v, &w};
  return checked(observed_(args), 0.0, "D", args);
}

double KernelBundle::perturbation(const Point& v, const Point& w) const {
  const Point* args[] = {&v, &w};
  return checked(perturbation_(args), 0.0, "hbar", args);
}

double KernelBundle::control(const Point& v, const Point& w) const {
  const Point* args[] = {&v, &w};
  return checked(control_(args), 1.0, "zeta", args);
}

double KernelBundle::control(const Point& v, const Point& w, const Point& z) const {
  const Point* args[] = {&v, &w, &z};
  return checked(control_(args), 1.0, "zeta", args);
}

double KernelBundle::observed(const Point& v, const Point& w, const Point& z) const {
  const Point* args[] = {&v, &w, &z};
  return checked(observed_(args), 0.0, "S", args);
}

double KernelBundle::perturbation(const Point& v, const Point& w, const Point& z) const {
  const Point* args[] = {&v, &w, &z};
  return checked(perturbation_(args), 0.0, "hbar_S", args);
}

KernelBundle KernelBundle::without_perturbation() const {
  return KernelBundle(mode_, observed_, Kernel::constant(perturbation_.arity(), 0.0), control_);
}

KernelBundle KernelBundle::with_control(Kernel control) const {
  return KernelBundle(mode_, observed_, perturbation_, std::move(control));
}

std::string KernelBundle::describe() const {
  return std::string(mode_ == Mode::TwoPoint ? "two_point" : "s_mode") + "|D=" +
         observed_.source() + "|hbar=" + perturbation_.source() + "|zeta" +
         std::to_string(control_.arity()) + "=" + control_.source();
}

double exact_distance(const KernelBundle& bundle, const Point& v, const Point& w) {
  return bundle.observed(v, w) - bundle.perturbation(v, w);
}

double exact_distance(const KernelBundle& bundle, const Point& v, const Point& w,
                      const Point& z) {
  return bundle.observed(v, w, z) - bundle.perturbation(v, w, z);
}

}  // namespace metriclab
