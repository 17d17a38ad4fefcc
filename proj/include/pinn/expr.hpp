// Closed-form coefficient fields: a small expression grammar over constants,
// coordinates x0..x9, pi, + - *, and exp/sin/cos/tanh. Expressions are kept
// as source text so operator and problem configs round-trip through JSON.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinn/jet.hpp"

namespace pinn {

class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& src) {
    Parser p{src, 0};
    Expr e;
    e.src_ = src;
    e.root_ = p.parse_sum();
    p.skip_ws();
    if (p.pos != src.size()) throw std::invalid_argument("Expr: trailing input in '" + src + "'");
    return e;
  }

  const std::string& source() const { return src_; }
  bool empty() const { return root_ == nullptr; }

  double eval(std::span<const double> x) const { return eval_node(*root_, x); }

  Jet<double> eval_jet(std::shared_ptr<const JetSpace> space, std::span<const double> x) const {
    return eval_jet_node(*root_, space, x);
  }

  int max_coord() const { return root_ ? max_coord_node(*root_) : -1; }

 private:
  enum class Kind { kNum, kCoord, kAdd, kSub, kMul, kNeg, kExp, kSin, kCos, kTanh };
  struct Node {
    Kind kind;
    double num = 0.0;
    int coord = 0;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr parse_sum() {
      NodePtr left = parse_term();
      while (true) {
        skip_ws();
        if (eat('+')) {
          left = make(Kind::kAdd, left, parse_term());
        } else if (eat('-')) {
          left = make(Kind::kSub, left, parse_term());
        } else {
          return left;
        }
      }
    }

    NodePtr parse_term() {
      NodePtr left = parse_factor();
      while (eat('*')) left = make(Kind::kMul, left, parse_factor());
      return left;
    }

    NodePtr parse_factor() {
      skip_ws();
      if (eat('-')) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::kNeg;
        n->a = parse_factor();
        return n;
      }
      return parse_atom();
    }

    NodePtr parse_atom() {
      skip_ws();
      if (pos >= s.size()) throw std::invalid_argument("Expr: unexpected end in '" + s + "'");
      char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr inner = parse_sum();
        if (!eat(')')) throw std::invalid_argument("Expr: missing ')' in '" + s + "'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* start = s.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) throw std::invalid_argument("Expr: bad number in '" + s + "'");
        pos += static_cast<std::size_t>(end - start);
        auto n = std::make_shared<Node>();
        n->kind = Kind::kNum;
        n->num = v;
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
          ++pos;
        std::string name = s.substr(start, pos - start);
        if (name == "pi") {
          auto n = std::make_shared<Node>();
          n->kind = Kind::kNum;
          n->num = 3.14159265358979323846;
          return n;
        }
        if (name.size() >= 2 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
          auto n = std::make_shared<Node>();
          n->kind = Kind::kCoord;
          n->coord = std::atoi(name.c_str() + 1);
          return n;
        }
        Kind k;
        if (name == "exp")
          k = Kind::kExp;
        else if (name == "sin")
          k = Kind::kSin;
        else if (name == "cos")
          k = Kind::kCos;
        else if (name == "tanh")
          k = Kind::kTanh;
        else
          throw std::invalid_argument("Expr: unknown symbol '" + name + "' in '" + s + "'");
        if (!eat('(')) throw std::invalid_argument("Expr: expected '(' after " + name);
        NodePtr arg = parse_sum();
        if (!eat(')')) throw std::invalid_argument("Expr: missing ')' in '" + s + "'");
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = arg;
        return n;
      }
      throw std::invalid_argument("Expr: unexpected character in '" + s + "'");
    }

    static NodePtr make(Kind k, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
  };

  static double eval_node(const Node& n, std::span<const double> x) {
    switch (n.kind) {
      case Kind::kNum: return n.num;
      case Kind::kCoord:
        if (n.coord >= static_cast<int>(x.size()))
          throw std::invalid_argument("Expr: coordinate index out of range");
        return x[static_cast<std::size_t>(n.coord)];
      case Kind::kAdd: return eval_node(*n.a, x) + eval_node(*n.b, x);
      case Kind::kSub: return eval_node(*n.a, x) - eval_node(*n.b, x);
      case Kind::kMul: return eval_node(*n.a, x) * eval_node(*n.b, x);
      case Kind::kNeg: return -eval_node(*n.a, x);
      case Kind::kExp: return std::exp(eval_node(*n.a, x));
      case Kind::kSin: return std::sin(eval_node(*n.a, x));
      case Kind::kCos: return std::cos(eval_node(*n.a, x));
      case Kind::kTanh: return std::tanh(eval_node(*n.a, x));
    }
    throw std::logic_error("Expr: bad node");
  }

  static Jet<double> eval_jet_node(const Node& n, const std::shared_ptr<const JetSpace>& space,
                                   std::span<const double> x) {
    switch (n.kind) {
      case Kind::kNum: return jet_constant<double>(space, x, n.num);
      case Kind::kCoord: return jet_variable<double>(space, n.coord, x);
      case Kind::kAdd: return jet_add(eval_jet_node(*n.a, space, x), eval_jet_node(*n.b, space, x));
      case Kind::kSub: return jet_sub(eval_jet_node(*n.a, space, x), eval_jet_node(*n.b, space, x));
      case Kind::kMul: return jet_mul(eval_jet_node(*n.a, space, x), eval_jet_node(*n.b, space, x));
      case Kind::kNeg: return jet_scale(eval_jet_node(*n.a, space, x), -1.0);
      case Kind::kExp: return jet_exp(eval_jet_node(*n.a, space, x));
      case Kind::kSin: return jet_sin(eval_jet_node(*n.a, space, x));
      case Kind::kCos: return jet_cos(eval_jet_node(*n.a, space, x));
      case Kind::kTanh: return jet_tanh(eval_jet_node(*n.a, space, x));
    }
    throw std::logic_error("Expr: bad node");
  }

  static int max_coord_node(const Node& n) {
    int m = -1;
    if (n.kind == Kind::kCoord) m = n.coord;
    if (n.a) m = std::max(m, max_coord_node(*n.a));
    if (n.b) m = std::max(m, max_coord_node(*n.b));
    return m;
  }

  NodePtr root_;
  std::string src_;
};

}  // namespace pinn
