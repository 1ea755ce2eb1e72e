// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "ergocheck/error.hpp"

namespace ergocheck::cli {

enum class Op { Const, VarX, VarU, Neg, Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Abs, Exp, Log, Sqrt, Sgn, Min, Max, If };

struct ExprNode {
  Op op;
  double value = 0.0;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  return std::make_shared<const ExprNode>(ExprNode{op, value, std::move(args)});
}

double eval(const ExprNode& n, double x, double u) {
  auto a = [&](std::size_t k) { return eval(*n.args[k], x, u); };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarX: return x;
    case Op::VarU: return u;
    case Op::Neg: return -a(0);
    case Op::Add: return a(0) + a(1);
    case Op::Sub: return a(0) - a(1);
    case Op::Mul: return a(0) * a(1);
    case Op::Div: return a(0) / a(1);
    case Op::Pow: return std::pow(a(0), a(1));
    case Op::Lt: return a(0) < a(1) ? 1.0 : 0.0;
    case Op::Le: return a(0) <= a(1) ? 1.0 : 0.0;
    case Op::Gt: return a(0) > a(1) ? 1.0 : 0.0;
    case Op::Ge: return a(0) >= a(1) ? 1.0 : 0.0;
    case Op::Abs: return std::abs(a(0));
    case Op::Exp: return std::exp(a(0));
    case Op::Log: return std::log(a(0));
    case Op::Sqrt: return std::sqrt(a(0));
    case Op::Sgn: {
      const double v = a(0);
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    case Op::Min: return std::min(a(0), a(1));
    case Op::Max: return std::max(a(0), a(1));
    case Op::If: return a(0) != 0.0 ? a(1) : a(2);
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr root = cmp();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

  bool uses_u = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, msg + " at column " + std::to_string(pos_ + 1) + " in '" + std::string(s_) + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(std::string_view(&c, 1))) fail(std::string("expected '") + c + "'");
  }

  NodePtr cmp() {
    NodePtr lhs = sum();
    // Two-character operators first so that '<=' is not read as '<'.
    for (auto [tok, op] : {std::pair{"<=", Op::Le}, {">=", Op::Ge}, {"<", Op::Lt}, {">", Op::Gt}}) {
      if (accept(tok)) return make(op, {lhs, sum()});
    }
    return lhs;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (accept("+")) {
        lhs = make(Op::Add, {lhs, product()});
      } else if (accept("-")) {
        lhs = make(Op::Sub, {lhs, product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept("*")) {
        lhs = make(Op::Mul, {lhs, unary()});
      } else if (accept("/")) {
        lhs = make(Op::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept("-")) return make(Op::Neg, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept("^")) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (accept("(")) {
      NodePtr inner = cmp();
      expect(')');
      return inner;
    }
    if (accept("|")) {
      NodePtr inner = cmp();
      expect('|');
      return make(Op::Abs, {inner});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make(Op::Const, {}, v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "x") return make(Op::VarX);
    if (id == "u") {
      uses_u = true;
      return make(Op::VarU);
    }
    struct Fn {
      const char* name;
      Op op;
      std::size_t arity;
    };
    static constexpr Fn kFns[] = {
        {"abs", Op::Abs, 1}, {"exp", Op::Exp, 1}, {"log", Op::Log, 1}, {"sqrt", Op::Sqrt, 1},
        {"sgn", Op::Sgn, 1}, {"min", Op::Min, 2}, {"max", Op::Max, 2}, {"if", Op::If, 3},
    };
    for (const Fn& fn : kFns) {
      if (id != fn.name) continue;
      expect('(');
      std::vector<NodePtr> args{cmp()};
      while (accept(",")) args.push_back(cmp());
      expect(')');
      if (args.size() != fn.arity) {
        fail(id + " takes " + std::to_string(fn.arity) + " argument(s), got " + std::to_string(args.size()));
      }
      return make(fn.op, std::move(args));
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  NodePtr root = p.parse_all();
  return Expression(std::string(text), std::move(root), p.uses_u);
}

double Expression::operator()(double x, double u) const { return eval(*root_, x, u); }

}  // namespace ergocheck::cli
