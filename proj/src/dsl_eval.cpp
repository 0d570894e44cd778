#include <cmath>

#include "metriclab/dsl.hpp"

namespace metriclab::dsl {

namespace {

constexpr const char* kVarNames[] = {"x", "y", "z", "t"};

class Evaluator {
 public:
  explicit Evaluator(const Bindings& b) : b_(b), index_(b.index) {}

  double value(const Node& n) {
    switch (n.kind) {
      case NodeKind::Constant:
        return n.value;
      case NodeKind::Var:
        return var_value(n);
      case NodeKind::Index:
        return index_value(n);
      case NodeKind::Neg:
        return finite(n, -operand(n, 0));
      case NodeKind::Abs:
        return std::abs(operand(n, 0));
      case NodeKind::Binary:
        return binary(n);
      case NodeKind::Reduce:
        return reduce(n);
      case NodeKind::Conditional:
        return truth(*n.children[0]) ? value(*n.children[1]) : value(*n.children[2]);
      case NodeKind::Compare:
      case NodeKind::Even:
      case NodeKind::Logic:
        throw EvalError(EvalErrorKind::DomainError, n.offset, "condition used as a value");
    }
    return 0.0;
  }

  bool truth(const Node& n) {
    switch (n.kind) {
      case NodeKind::Compare: {
        const double a = value(*n.children[0]);
        const double b = value(*n.children[1]);
        switch (n.compare) {
          case CompareOp::Eq: return a == b;
          case CompareOp::Ne: return a != b;
          case CompareOp::Lt: return a < b;
          case CompareOp::Le: return a <= b;
          case CompareOp::Gt: return a > b;
          case CompareOp::Ge: return a >= b;
        }
        return false;
      }
      case NodeKind::Even:
        return is_even(value(*n.children[0]));
      case NodeKind::Logic:
        if (n.logic == LogicOp::And) return truth(*n.children[0]) && truth(*n.children[1]);
        return truth(*n.children[0]) || truth(*n.children[1]);
      default:
        throw EvalError(EvalErrorKind::DomainError, n.offset, "value used as a condition");
    }
  }

 private:
  [[noreturn]] static void domain(const Node& n, const std::string& what) {
    throw EvalError(EvalErrorKind::DomainError, n.offset, what);
  }

  static double finite(const Node& n, double v) {
    if (!std::isfinite(v)) domain(n, "non-finite intermediate value");
    return v;
  }

  // Operand that must be finite. Only division and comparisons accept INF.
  double operand(const Node& n, std::size_t k) {
    return finite(*n.children[k], value(*n.children[k]));
  }

  const Point& bound(const Node& n) const {
    const Point* p = b_.vars[n.var];
    if (!p) {
      throw EvalError(EvalErrorKind::UnboundVariable, n.offset,
                      std::string("unbound variable '") + kVarNames[n.var] + "'");
    }
    return *p;
  }

  double var_value(const Node& n) const {
    const Point& p = bound(n);
    if (p.is_infinity()) return HUGE_VAL;
    if (p.is_vector()) {
      domain(n, std::string("vector point '") + kVarNames[n.var] + "' used as a scalar");
    }
    return p.value();
  }

  double index_value(const Node& n) const {
    const Point& p = bound(n);
    if (!p.is_vector()) {
      domain(n, std::string("indexing non-vector point '") + kVarNames[n.var] + "'");
    }
    std::size_t k;
    if (n.fixed_index) {
      k = *n.fixed_index;
    } else if (index_) {
      k = *index_;
    } else {
      throw EvalError(EvalErrorKind::UnboundVariable, n.offset,
                      "index 'i' used outside sum_i/max_i or a per-coordinate map");
    }
    if (k >= p.dimension()) domain(n, "index out of range");
    return p.coords()[k];
  }

  double binary(const Node& n) {
    if (n.binary == BinaryOp::Div) {
      const double a = operand(n, 0);
      const double b = value(*n.children[1]);
      if (std::isinf(b)) return 0.0;  // a / INF
      if (b == 0.0) throw EvalError(EvalErrorKind::DivisionByZero, n.offset, "division by zero");
      return finite(n, a / b);
    }
    const double a = operand(n, 0);
    const double b = operand(n, 1);
    switch (n.binary) {
      case BinaryOp::Add: return finite(n, a + b);
      case BinaryOp::Sub: return finite(n, a - b);
      case BinaryOp::Mul: return finite(n, a * b);
      case BinaryOp::Min: return a < b ? a : b;
      case BinaryOp::Max: return a < b ? b : a;
      case BinaryOp::Pow:
        if (a == 0.0 && b < 0.0) {
          throw EvalError(EvalErrorKind::DivisionByZero, n.offset, "zero raised to a negative power");
        }
        if (a < 0.0 && b != std::floor(b)) domain(n, "fractional power of a negative base");
        return finite(n, std::pow(a, b));
      case BinaryOp::Div:
        break;
    }
    return 0.0;
  }

  double reduce(const Node& n) {
    std::size_t dim = 0;
    for (const Point* p : b_.vars) {
      if (p && p->is_vector()) {
        dim = p->dimension();
        break;
      }
    }
    if (dim == 0) domain(n, "sum_i/max_i needs a vector-valued point");
    const auto saved = index_;
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      index_ = i;
      const double v = operand(n, 0);
      if (n.reduce == ReduceOp::Sum) {
        acc = finite(n, acc + v);
      } else {
        acc = (i == 0 || v > acc) ? v : acc;
      }
    }
    index_ = saved;
    return acc;
  }

  const Bindings& b_;
  std::optional<std::size_t> index_;
};

}  // namespace

EvalError::EvalError(EvalErrorKind kind, std::size_t offset, const std::string& what)
    : EvaluationError(what + " (at offset " + std::to_string(offset) + ")"),
      kind_(kind),
      offset_(offset) {}

double Expr::evaluate(const Bindings& bindings) const {
  Evaluator ev(bindings);
  const double v = ev.value(*root_);
  if (!std::isfinite(v)) {
    throw EvalError(EvalErrorKind::DomainError, root_->offset, "expression evaluated to a non-finite value");
  }
  return v;
}

double Expr::operator()(const Point& x) const {
  Bindings b;
  b.vars[0] = &x;
  return evaluate(b);
}

double Expr::operator()(const Point& x, const Point& y) const {
  Bindings b;
  b.vars[0] = &x;
  b.vars[1] = &y;
  return evaluate(b);
}

double Expr::operator()(const Point& x, const Point& y, const Point& z) const {
  Bindings b;
  b.vars[0] = &x;
  b.vars[1] = &y;
  b.vars[2] = &z;
  return evaluate(b);
}

}  // namespace metriclab::dsl
