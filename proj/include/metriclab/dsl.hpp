#pragma once

// Expression language for user-defined kernels (D, hbar, zeta) and self-maps.
// Grammar and semantics are documented in docs/dsl.md.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metriclab/errors.hpp"
#include "metriclab/point.hpp"

namespace metriclab::dsl {

inline constexpr std::size_t kMaxDepth = 64;
inline constexpr std::size_t kMaxNodes = 4096;

enum class NodeKind {
  Constant,     // value (INF literal is the constant +inf)
  Var,          // var
  Index,        // var[i] or var[k]
  Neg,          // -a
  Abs,          // abs(a)
  Binary,       // a op b
  Reduce,       // sum_i(a) / max_i(a)
  Conditional,  // a if cond else b
  Compare,      // a relop b
  Even,         // even(a)
  Logic,        // c and d / c or d
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Min, Max };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ReduceOp { Sum, Max };
enum class LogicOp { And, Or };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  std::size_t offset = 0;  // byte offset of the node's first token
  double value = 0.0;
  int var = 0;  // 0..3 for x, y, z, t
  std::optional<std::size_t> fixed_index;  // x[3]; absent means x[i]
  BinaryOp binary = BinaryOp::Add;
  CompareOp compare = CompareOp::Eq;
  ReduceOp reduce = ReduceOp::Sum;
  LogicOp logic = LogicOp::And;
  std::vector<NodePtr> children;
};

/// Syntax error with the byte offset where parsing stopped.
class ParseError : public ConfigError {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             std::string found);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// A variable outside the declared arity was used.
class ArityError : public ConfigError {
 public:
  ArityError(std::size_t offset, std::string name, unsigned arity);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class EvalErrorKind { DivisionByZero, DomainError, UnboundVariable };

class EvalError : public EvaluationError {
 public:
  EvalError(EvalErrorKind kind, std::size_t offset, const std::string& what);
  EvalErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  EvalErrorKind kind_;
  std::size_t offset_;
};

/// Variable bindings for one evaluation. `vars[k]` binds x, y, z, t in
/// order; `index` binds `i` outside any reduction (per-coordinate maps).
struct Bindings {
  std::array<const Point*, 4> vars{};
  std::optional<std::size_t> index;
};

/// Parsed, immutable expression. Safe to evaluate concurrently.
class Expr {
 public:
  Expr(NodePtr root, unsigned arity, std::string source);

  const Node& root() const { return *root_; }
  unsigned arity() const { return arity_; }
  const std::string& source() const { return source_; }

  double evaluate(const Bindings& bindings) const;
  double operator()(const Point& x) const;
  double operator()(const Point& x, const Point& y) const;
  double operator()(const Point& x, const Point& y, const Point& z) const;

 private:
  NodePtr root_;
  unsigned arity_;
  std::string source_;
};

/// Parses `source` in a slot of the given arity (1..4). Throws ParseError or
/// ArityError; never crashes on arbitrary input.
Expr parse(std::string_view source, unsigned arity);

/// Canonical form; parse(print(e)) prints identically.
std::string print(const Node& node);
inline std::string print(const Expr& e) { return print(e.root()); }

std::size_t depth(const Node& node);
std::size_t node_count(const Node& node);

/// Walks the tree in pre-order.
template <class F>
void visit(const Node& node, F&& f) {
  f(node);
  for (const auto& c : node.children) visit(*c, f);
}

/// True iff v is within 1e-9 of an even integer.
bool is_even(double v);

}  // namespace metriclab::dsl
