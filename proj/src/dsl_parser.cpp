#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "metriclab/dsl.hpp"

namespace metriclab::dsl {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += (i + 1 == items.size()) ? " or " : ", ";
    s += items[i];
  }
  return s;
}

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  std::size_t offset = 0;
  double number = 0.0;
};

constexpr std::string_view kVarNames[] = {"x", "y", "z", "t"};

int var_index(std::string_view name) {
  for (int k = 0; k < 4; ++k) {
    if (kVarNames[k] == name) return k;
  }
  return -1;
}

class Parser {
 public:
  Parser(std::string_view src, unsigned arity) : src_(src), arity_(arity) {
    advance();
  }

  NodePtr parse_all() {
    NodePtr root = expr();
    if (tok_.kind != Tok::End) fail({"operator", "'if'", "end of input"});
    return root;
  }

 private:
  // Bounds recursion independently of tree depth so hostile input cannot
  // exhaust the stack; tree depth is validated after parsing.
  struct Guard {
    explicit Guard(Parser& p) : p_(p) {
      if (++p_.nesting_ > 4 * kMaxDepth) {
        throw ParseError(p_.tok_.offset, {"shallower nesting"}, std::string(p_.found()));
      }
    }
    ~Guard() { --p_.nesting_; }
    Parser& p_;
  };

  std::string_view found() const {
    return tok_.kind == Tok::End ? std::string_view("end of input") : tok_.text;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(tok_.offset, std::move(expected), std::string(found()));
  }

  std::shared_ptr<Node> make(NodeKind kind, std::size_t offset) {
    if (++nodes_ > kMaxNodes) {
      throw ParseError(offset, {"at most 4096 nodes"}, std::string(found()));
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->offset = offset;
    return n;
  }

  void advance() { tok_ = lex(); }

  Token lex() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      t.offset = src_.size();
      return t;
    }
    const char c = src_[pos_];
    auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
    auto is_alpha = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
    };
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      std::size_t end = pos_;
      while (end < src_.size() && is_digit(src_[end])) ++end;
      if (end < src_.size() && src_[end] == '.') {
        ++end;
        while (end < src_.size() && is_digit(src_[end])) ++end;
      }
      if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
        std::size_t e = end + 1;
        if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
        if (e < src_.size() && is_digit(src_[e])) {
          while (e < src_.size() && is_digit(src_[e])) ++e;
          end = e;
        }
      }
      t.kind = Tok::Number;
      t.text = src_.substr(pos_, end - pos_);
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() ||
          !std::isfinite(t.number)) {
        throw ParseError(pos_, {"finite number"}, std::string(t.text));
      }
      pos_ = end;
      return t;
    }
    if (is_alpha(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
      t.kind = Tok::Ident;
      t.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return t;
    }
    static constexpr std::string_view kOps[] = {
        "\xE2\x89\xA0", "\xE2\x89\xA4", "\xE2\x89\xA5",  // ≠ ≤ ≥
        "==", "!=", "<=", ">=", "+", "-", "*", "/", "^", "(", ")", "[", "]",
        ",", "=", "<", ">"};
    for (std::string_view op : kOps) {
      if (src_.substr(pos_, op.size()) == op) {
        t.kind = Tok::Op;
        t.text = src_.substr(pos_, op.size());
        pos_ += op.size();
        return t;
      }
    }
    // Unknown byte: report a one-byte token.
    throw ParseError(pos_, {"expression"}, std::string(src_.substr(pos_, 1)));
  }

  bool is_op(std::string_view op) const { return tok_.kind == Tok::Op && tok_.text == op; }
  bool is_ident(std::string_view id) const { return tok_.kind == Tok::Ident && tok_.text == id; }

  void expect_op(std::string_view op) {
    if (!is_op(op)) fail({"'" + std::string(op) + "'"});
    advance();
  }

  // expr := sum ('if' cond 'else' expr)?
  NodePtr expr() {
    Guard g(*this);
    const std::size_t start = tok_.offset;
    NodePtr value = sum();
    if (!is_ident("if")) return value;
    advance();
    NodePtr c = cond();
    if (!is_ident("else")) fail({"'else'", "'and'", "'or'"});
    advance();
    NodePtr other = expr();
    auto n = make(NodeKind::Conditional, start);
    n->children = {c, value, other};
    return n;
  }

  // cond := conj ('or' conj)*
  NodePtr cond() {
    NodePtr left = conj();
    while (is_ident("or")) {
      const std::size_t at = tok_.offset;
      advance();
      auto n = make(NodeKind::Logic, at);
      n->logic = LogicOp::Or;
      n->children = {left, conj()};
      left = n;
    }
    return left;
  }

  // conj := rel ('and' rel)*
  NodePtr conj() {
    NodePtr left = rel();
    while (is_ident("and")) {
      const std::size_t at = tok_.offset;
      advance();
      auto n = make(NodeKind::Logic, at);
      n->logic = LogicOp::And;
      n->children = {left, rel()};
      left = n;
    }
    return left;
  }

  // rel := 'even' '(' expr ')' | sum relop sum
  NodePtr rel() {
    const std::size_t start = tok_.offset;
    if (is_ident("even")) {
      advance();
      expect_op("(");
      auto n = make(NodeKind::Even, start);
      n->children = {expr()};
      expect_op(")");
      return n;
    }
    NodePtr left = sum();
    CompareOp op;
    if (is_op("=") || is_op("==")) {
      op = CompareOp::Eq;
    } else if (is_op("!=") || is_op("\xE2\x89\xA0")) {
      op = CompareOp::Ne;
    } else if (is_op("<")) {
      op = CompareOp::Lt;
    } else if (is_op("<=") || is_op("\xE2\x89\xA4")) {
      op = CompareOp::Le;
    } else if (is_op(">")) {
      op = CompareOp::Gt;
    } else if (is_op(">=") || is_op("\xE2\x89\xA5")) {
      op = CompareOp::Ge;
    } else {
      fail({"comparison operator"});
    }
    advance();
    auto n = make(NodeKind::Compare, start);
    n->compare = op;
    n->children = {left, sum()};
    return n;
  }

  NodePtr binary(BinaryOp op, std::size_t at, NodePtr a, NodePtr b) {
    auto n = make(NodeKind::Binary, at);
    n->binary = op;
    n->children = {std::move(a), std::move(b)};
    return n;
  }

  // sum := term (('+'|'-') term)*
  NodePtr sum() {
    const std::size_t start = tok_.offset;
    NodePtr left = term();
    while (is_op("+") || is_op("-")) {
      const BinaryOp op = is_op("+") ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      left = binary(op, start, left, term());
    }
    return left;
  }

  // term := unary (('*'|'/') unary)*
  NodePtr term() {
    const std::size_t start = tok_.offset;
    NodePtr left = unary();
    while (is_op("*") || is_op("/")) {
      const BinaryOp op = is_op("*") ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      left = binary(op, start, left, unary());
    }
    return left;
  }

  // unary := '-' unary | power
  NodePtr unary() {
    Guard g(*this);
    if (is_op("-")) {
      const std::size_t at = tok_.offset;
      advance();
      auto n = make(NodeKind::Neg, at);
      n->children = {unary()};
      return n;
    }
    return power();
  }

  // power := atom ('^' unary)?   -- right associative through unary
  NodePtr power() {
    const std::size_t start = tok_.offset;
    NodePtr base = atom();
    if (!is_op("^")) return base;
    advance();
    return binary(BinaryOp::Pow, start, base, unary());
  }

  NodePtr call_args(std::shared_ptr<Node> n, std::size_t count) {
    expect_op("(");
    for (std::size_t k = 0; k < count; ++k) {
      if (k) expect_op(",");
      n->children.push_back(expr());
    }
    expect_op(")");
    return n;
  }

  NodePtr atom() {
    const std::size_t start = tok_.offset;
    if (tok_.kind == Tok::Number) {
      auto n = make(NodeKind::Constant, start);
      n->value = tok_.number;
      advance();
      return n;
    }
    if (is_op("(")) {
      advance();
      NodePtr inner = expr();
      expect_op(")");
      return inner;
    }
    if (tok_.kind != Tok::Ident) fail({"number", "variable", "function", "'('"});

    const std::string_view id = tok_.text;
    if (id == "INF") {
      auto n = make(NodeKind::Constant, start);
      n->value = std::numeric_limits<double>::infinity();
      advance();
      return n;
    }
    if (const int v = var_index(id); v >= 0) {
      if (static_cast<unsigned>(v) >= arity_) throw ArityError(start, std::string(id), arity_);
      advance();
      if (!is_op("[")) {
        auto n = make(NodeKind::Var, start);
        n->var = v;
        return n;
      }
      advance();
      auto n = make(NodeKind::Index, start);
      n->var = v;
      if (is_ident("i")) {
        advance();
      } else if (tok_.kind == Tok::Number && tok_.number >= 0 &&
                 tok_.number == std::floor(tok_.number) && tok_.number < 1e9) {
        n->fixed_index = static_cast<std::size_t>(tok_.number);
        advance();
      } else {
        fail({"'i'", "nonnegative integer index"});
      }
      expect_op("]");
      return n;
    }
    if (id == "abs") {
      advance();
      return call_args(make(NodeKind::Abs, start), 1);
    }
    if (id == "min" || id == "max" || id == "pow") {
      const BinaryOp op = id == "min" ? BinaryOp::Min : id == "max" ? BinaryOp::Max : BinaryOp::Pow;
      advance();
      auto n = make(NodeKind::Binary, start);
      n->binary = op;
      return call_args(n, 2);
    }
    if (id == "sum_i" || id == "max_i") {
      const ReduceOp op = id == "sum_i" ? ReduceOp::Sum : ReduceOp::Max;
      advance();
      auto n = make(NodeKind::Reduce, start);
      n->reduce = op;
      return call_args(n, 1);
    }
    fail({"number", "variable", "function", "'('"});
  }

  std::string_view src_;
  unsigned arity_;
  std::size_t pos_ = 0;
  Token tok_;
  std::size_t nesting_ = 0;
  std::size_t nodes_ = 0;
};

std::string shortest(double v) {
  if (std::isinf(v)) return v > 0 ? "INF" : "(-INF)";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (v < 0) return "(" + s + ")";
  return s;
}

const Node* deepest(const Node& node, std::size_t& best_depth, std::size_t depth_so_far) {
  const Node* best = &node;
  best_depth = depth_so_far;
  for (const auto& c : node.children) {
    std::size_t d = 0;
    const Node* cand = deepest(*c, d, depth_so_far + 1);
    if (d > best_depth) {
      best_depth = d;
      best = cand;
    }
  }
  return best;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       std::string found)
    : ConfigError("parse error at offset " + std::to_string(offset) + ": expected " +
                  join(expected) + ", found '" + found + "'"),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

ArityError::ArityError(std::size_t offset, std::string name, unsigned arity)
    : ConfigError("variable '" + name + "' at offset " + std::to_string(offset) +
                  " is not available in a slot of arity " + std::to_string(arity)),
      offset_(offset) {}

Expr::Expr(NodePtr root, unsigned arity, std::string source)
    : root_(std::move(root)), arity_(arity), source_(std::move(source)) {}

Expr parse(std::string_view source, unsigned arity) {
  if (arity < 1 || arity > 4) throw ConfigError("expression arity must be in 1..4");
  NodePtr root = Parser(source, arity).parse_all();
  std::size_t d = 0;
  const Node* deep = deepest(*root, d, 1);
  if (d > kMaxDepth) {
    throw ParseError(deep->offset, {"expression depth <= 64"}, "depth " + std::to_string(d));
  }
  return Expr(std::move(root), arity, std::string(source));
}

std::size_t depth(const Node& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, depth(*c));
  return d + 1;
}

std::size_t node_count(const Node& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += node_count(*c);
  return n;
}

std::string print(const Node& n) {
  auto child = [&](std::size_t k) { return print(*n.children[k]); };
  switch (n.kind) {
    case NodeKind::Constant:
      return shortest(n.value);
    case NodeKind::Var:
      return std::string(kVarNames[n.var]);
    case NodeKind::Index:
      return std::string(kVarNames[n.var]) + "[" +
             (n.fixed_index ? std::to_string(*n.fixed_index) : std::string("i")) + "]";
    case NodeKind::Neg:
      return "(-" + child(0) + ")";
    case NodeKind::Abs:
      return "abs(" + child(0) + ")";
    case NodeKind::Binary:
      switch (n.binary) {
        case BinaryOp::Add: return "(" + child(0) + " + " + child(1) + ")";
        case BinaryOp::Sub: return "(" + child(0) + " - " + child(1) + ")";
        case BinaryOp::Mul: return "(" + child(0) + " * " + child(1) + ")";
        case BinaryOp::Div: return "(" + child(0) + " / " + child(1) + ")";
        case BinaryOp::Pow: return "(" + child(0) + " ^ " + child(1) + ")";
        case BinaryOp::Min: return "min(" + child(0) + ", " + child(1) + ")";
        case BinaryOp::Max: return "max(" + child(0) + ", " + child(1) + ")";
      }
      break;
    case NodeKind::Reduce:
      return (n.reduce == ReduceOp::Sum ? "sum_i(" : "max_i(") + child(0) + ")";
    case NodeKind::Conditional:
      return "(" + child(1) + " if " + child(0) + " else " + child(2) + ")";
    case NodeKind::Compare: {
      static constexpr const char* kOps[] = {" = ", " != ", " < ", " <= ", " > ", " >= "};
      return child(0) + kOps[static_cast<int>(n.compare)] + child(1);
    }
    case NodeKind::Even:
      return "even(" + child(0) + ")";
    case NodeKind::Logic:
      return child(0) + (n.logic == LogicOp::And ? " and " : " or ") + child(1);
  }
  return {};
}

bool is_even(double v) {
  if (!std::isfinite(v)) return false;
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) return false;
  return std::fmod(r, 2.0) == 0.0;
}

}  // namespace metriclab::dsl
