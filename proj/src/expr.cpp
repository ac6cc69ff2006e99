#include "pdestab/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace pdestab {

namespace {

struct FuncInfo {
  std::string_view name;
  FuncId id;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", FuncId::sin, 1},  {"cos", FuncId::cos, 1},  {"tan", FuncId::tan, 1},
    {"exp", FuncId::exp, 1},  {"log", FuncId::log, 1},  {"sqrt", FuncId::sqrt, 1},
    {"abs", FuncId::abs, 1},  {"pow", FuncId::pow, 2},  {"min", FuncId::min, 2},
    {"max", FuncId::max, 2},
};

const FuncInfo* find_func(std::string_view name) {
  for (const auto& f : kFuncs)
    if (f.name == name) return &f;
  return nullptr;
}

std::string_view func_name(FuncId id) {
  for (const auto& f : kFuncs)
    if (f.id == id) return f.name;
  return "?";
}

struct Token {
  enum class T { num, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };
  T type;
  double num = 0.0;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto is_ident_char = [&](char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    const std::size_t pos = i;
    switch (c) {
      case '+': out.push_back({Token::T::plus, 0, "", pos}); ++i; continue;
      case '-': out.push_back({Token::T::minus, 0, "", pos}); ++i; continue;
      case '*': out.push_back({Token::T::star, 0, "", pos}); ++i; continue;
      case '/': out.push_back({Token::T::slash, 0, "", pos}); ++i; continue;
      case '^': out.push_back({Token::T::caret, 0, "", pos}); ++i; continue;
      case '(': out.push_back({Token::T::lparen, 0, "", pos}); ++i; continue;
      case ')': out.push_back({Token::T::rparen, 0, "", pos}); ++i; continue;
      case ',': out.push_back({Token::T::comma, 0, "", pos}); ++i; continue;
      default: break;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      std::size_t j = i;
      while (j < src.size() && ((src[j] >= '0' && src[j] <= '9') || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && src[k] >= '0' && src[k] <= '9') {
          while (k < src.size() && src[k] >= '0' && src[k] <= '9') ++k;
          j = k;
        }
      }
      double v = 0.0;
      const char* first = src.data() + i;
      const char* last = src.data() + j;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last)
        throw ExprError("malformed number literal", pos);
      out.push_back({Token::T::num, v, std::string(src.substr(i, j - i)), pos});
      i = j;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      out.push_back({Token::T::ident, 0, std::string(src.substr(i, j - i)), pos});
      i = j;
      continue;
    }
    throw ExprError(std::string("unexpected character '") + c + "'", pos);
  }
  out.push_back({Token::T::end, 0, "", src.size()});
  return out;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view src, std::span<const std::string> vars)
      : toks_(tokenize(src)), vars_(vars) {
    expr_.vars_.assign(vars.begin(), vars.end());
  }

  Expr run() {
    const int root = parse_expr();
    if (peek().type != Token::T::end)
      throw ExprError("unexpected trailing input", peek().pos);
    expr_.root_ = root;
    return std::move(expr_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int depth_ = 0;
  std::span<const std::string> vars_;
  Expr expr_;

  const Token& peek() const { return toks_[i_]; }
  const Token& advance() { return toks_[i_++]; }

  int add(Expr::Node n) {
    expr_.nodes_.push_back(n);
    return static_cast<int>(expr_.nodes_.size()) - 1;
  }

  struct DepthGuard {
    int& d;
    explicit DepthGuard(int& depth, std::size_t pos) : d(depth) {
      if (++d > 200) throw ExprError("expression nests too deeply", pos);
    }
    ~DepthGuard() { --d; }
  };

  int parse_expr() {
    DepthGuard g(depth_, peek().pos);
    int lhs = parse_term();
    while (peek().type == Token::T::plus || peek().type == Token::T::minus) {
      const bool plus = advance().type == Token::T::plus;
      const int rhs = parse_term();
      lhs = add({plus ? Expr::Kind::add : Expr::Kind::sub, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_factor();
    while (peek().type == Token::T::star || peek().type == Token::T::slash) {
      const bool mul = advance().type == Token::T::star;
      const int rhs = parse_factor();
      lhs = add({mul ? Expr::Kind::mul : Expr::Kind::div, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_factor() {
    DepthGuard g(depth_, peek().pos);
    if (peek().type == Token::T::minus) {
      advance();
      const int child = parse_factor();
      return add({Expr::Kind::neg, 0, child});
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    if (peek().type == Token::T::caret) {
      advance();
      const int exponent = parse_factor();  // right associative, unary minus ok
      return add({Expr::Kind::pow_op, 0, base, exponent});
    }
    return base;
  }

  int parse_atom() {
    const Token& t = peek();
    switch (t.type) {
      case Token::T::num: {
        advance();
        return add({Expr::Kind::number, t.num});
      }
      case Token::T::lparen: {
        advance();
        const int inner = parse_expr();
        if (peek().type != Token::T::rparen)
          throw ExprError("expected ')'", peek().pos);
        advance();
        return inner;
      }
      case Token::T::ident: {
        advance();
        if (peek().type == Token::T::lparen) {
          const FuncInfo* fn = find_func(t.text);
          if (!fn) throw ExprError("unknown function '" + t.text + "'", t.pos);
          advance();  // '('
          const int a = parse_expr();
          int b = -1;
          int argc = 1;
          while (peek().type == Token::T::comma) {
            advance();
            const int arg = parse_expr();
            if (argc == 1) b = arg;
            ++argc;
          }
          if (peek().type != Token::T::rparen)
            throw ExprError("expected ')'", peek().pos);
          advance();
          if (argc != fn->arity)
            throw ExprError("function '" + t.text + "' expects " +
                                std::to_string(fn->arity) + " argument(s)",
                            t.pos);
          Expr::Node n{fn->arity == 1 ? Expr::Kind::call1 : Expr::Kind::call2, 0, a, b};
          n.fn = fn->id;
          return add(n);
        }
        if (t.text == "pi") return add({Expr::Kind::pi_const});
        for (std::size_t s = 0; s < vars_.size(); ++s) {
          if (vars_[s] == t.text) {
            Expr::Node n{Expr::Kind::var};
            n.slot = static_cast<int>(s);
            return add(n);
          }
        }
        throw ExprError("unknown variable '" + t.text + "'", t.pos);
      }
      default:
        throw ExprError("expected expression", t.pos);
    }
  }
};

Expr Expr::parse(std::string_view source, std::span<const std::string> variables) {
  if (source.empty()) throw ExprError("empty expression", 0);
  return ExprParser(source, variables).run();
}

Expr Expr::number(double v) {
  Expr e;
  e.nodes_.push_back({Kind::number, v});
  e.root_ = 0;
  return e;
}

double Expr::eval_node(int idx, std::span<const double> values) const {
  const Node& n = nodes_[idx];
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::pi_const: return std::numbers::pi;
    case Kind::var: return values[n.slot];
    case Kind::neg: return -eval_node(n.a, values);
    case Kind::add: return eval_node(n.a, values) + eval_node(n.b, values);
    case Kind::sub: return eval_node(n.a, values) - eval_node(n.b, values);
    case Kind::mul: return eval_node(n.a, values) * eval_node(n.b, values);
    case Kind::div: {
      const double num = eval_node(n.a, values);
      const double den = eval_node(n.b, values);
      if (den == 0.0) throw ExprError("domain error: division by zero");
      return num / den;
    }
    case Kind::pow_op: {
      const double base = eval_node(n.a, values);
      const double exponent = eval_node(n.b, values);
      const double r = std::pow(base, exponent);
      if (!std::isfinite(r)) throw ExprError("domain error: pow out of range");
      return r;
    }
    case Kind::call1: {
      const double x = eval_node(n.a, values);
      double r = 0.0;
      switch (n.fn) {
        case FuncId::sin: r = std::sin(x); break;
        case FuncId::cos: r = std::cos(x); break;
        case FuncId::tan: r = std::tan(x); break;
        case FuncId::exp: r = std::exp(x); break;
        case FuncId::log:
          if (x <= 0.0) throw ExprError("domain error: log of non-positive value");
          r = std::log(x);
          break;
        case FuncId::sqrt:
          if (x < 0.0) throw ExprError("domain error: sqrt of negative value");
          r = std::sqrt(x);
          break;
        case FuncId::abs: r = std::fabs(x); break;
        default: throw ExprError("bad unary function");
      }
      if (!std::isfinite(r)) throw ExprError("domain error: non-finite result");
      return r;
    }
    case Kind::call2: {
      const double x = eval_node(n.a, values);
      const double y = eval_node(n.b, values);
      double r = 0.0;
      switch (n.fn) {
        case FuncId::pow: r = std::pow(x, y); break;
        case FuncId::min: r = std::fmin(x, y); break;
        case FuncId::max: r = std::fmax(x, y); break;
        default: throw ExprError("bad binary function");
      }
      if (!std::isfinite(r)) throw ExprError("domain error: non-finite result");
      return r;
    }
  }
  throw ExprError("corrupt expression node");
}

double Expr::eval(std::span<const double> values) const {
  if (root_ < 0) throw ExprError("evaluating an empty expression");
  if (values.size() != vars_.size())
    throw ExprError("wrong number of values for declared variables");
  const double r = eval_node(root_, values);
  if (!std::isfinite(r)) throw ExprError("domain error: non-finite result");
  return r;
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
  std::vector<double> vals(vars_.size(), 0.0);
  const auto free = free_variables();
  for (const auto& name : free)
    if (!bindings.count(name)) throw ExprError("unbound variable '" + name + "'");
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = bindings.find(vars_[i]);
    if (it != bindings.end()) vals[i] = it->second;
  }
  return eval(vals);
}

std::vector<std::string> Expr::free_variables() const {
  std::vector<bool> used(vars_.size(), false);
  for (const auto& n : nodes_)
    if (n.kind == Kind::var) used[n.slot] = true;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (used[i]) out.push_back(vars_[i]);
  return out;
}

bool Expr::depends_on(std::string_view name) const {
  for (const auto& n : nodes_)
    if (n.kind == Kind::var && vars_[n.slot] == name) return true;
  return false;
}

bool Expr::is_constant() const {
  for (const auto& n : nodes_)
    if (n.kind == Kind::var) return false;
  return root_ >= 0;
}

bool Expr::is_zero_literal() const {
  if (root_ < 0) return false;
  int idx = root_;
  while (nodes_[idx].kind == Kind::neg) idx = nodes_[idx].a;
  return nodes_[idx].kind == Kind::number && nodes_[idx].value == 0.0;
}

// precedence levels: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5
void Expr::print_node(int idx, int min_prec, std::string& out) const {
  const Node& n = nodes_[idx];
  int prec = 5;
  switch (n.kind) {
    case Kind::add: case Kind::sub: prec = 1; break;
    case Kind::mul: case Kind::div: prec = 2; break;
    case Kind::neg: prec = 3; break;
    case Kind::pow_op: prec = 4; break;
    case Kind::number: prec = (n.value < 0.0) ? 3 : 5; break;
    default: prec = 5; break;
  }
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case Kind::number: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      break;
    }
    case Kind::pi_const: out += "pi"; break;
    case Kind::var: out += vars_[n.slot]; break;
    case Kind::neg:
      out += '-';
      print_node(n.a, 3, out);
      break;
    case Kind::add:
      print_node(n.a, 1, out);
      out += '+';
      print_node(n.b, 2, out);
      break;
    case Kind::sub:
      print_node(n.a, 1, out);
      out += '-';
      print_node(n.b, 2, out);
      break;
    case Kind::mul:
      print_node(n.a, 2, out);
      out += '*';
      print_node(n.b, 3, out);
      break;
    case Kind::div:
      print_node(n.a, 2, out);
      out += '/';
      print_node(n.b, 3, out);
      break;
    case Kind::pow_op:
      print_node(n.a, 5, out);
      out += '^';
      print_node(n.b, 3, out);
      break;
    case Kind::call1:
      out += func_name(n.fn);
      out += '(';
      print_node(n.a, 0, out);
      out += ')';
      break;
    case Kind::call2:
      out += func_name(n.fn);
      out += '(';
      print_node(n.a, 0, out);
      out += ',';
      print_node(n.b, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

std::string Expr::to_string() const {
  if (root_ < 0) return "";
  std::string out;
  print_node(root_, 0, out);
  return out;
}

bool Expr::node_equal(const Expr& x, int i, const Expr& y, int j) {
  const Node& a = x.nodes_[i];
  const Node& b = y.nodes_[j];
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::number: return a.value == b.value;
    case Kind::pi_const: return true;
    case Kind::var: return x.vars_[a.slot] == y.vars_[b.slot];
    case Kind::neg: return node_equal(x, a.a, y, b.a);
    case Kind::call1: return a.fn == b.fn && node_equal(x, a.a, y, b.a);
    case Kind::call2:
      return a.fn == b.fn && node_equal(x, a.a, y, b.a) && node_equal(x, a.b, y, b.b);
    default:
      return node_equal(x, a.a, y, b.a) && node_equal(x, a.b, y, b.b);
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.root_ < 0 || b.root_ < 0) return a.root_ == b.root_;
  return Expr::node_equal(a, a.root_, b, b.root_);
}

DerivativePairReport check_derivative_pair(const Expr& f, const Expr& fz,
                                           double lo, double hi, int n, double tol) {
  if (!(lo < hi)) throw ExprError("check_derivative_pair: need lo < hi");
  if (n < 3) throw ExprError("check_derivative_pair: need at least 3 samples");
  DerivativePairReport rep;
  rep.tol = tol;
  rep.samples = n;
  for (int i = 0; i < n; ++i) {
    const double z = lo + (hi - lo) * i / (n - 1);
    const double h = std::max(1e-6, 1e-6 * std::fabs(z));
    const double zs[1] = {z};
    const double zp[1] = {z + h};
    const double zm[1] = {z - h};
    const double fd = (f.eval(std::span<const double>(zp, 1)) -
                       f.eval(std::span<const double>(zm, 1))) /
                      (2.0 * h);
    const double claimed = fz.eval(std::span<const double>(zs, 1));
    const double diff = std::fabs(fd - claimed);
    if (diff > rep.max_abs_discrepancy) {
      rep.max_abs_discrepancy = diff;
      rep.worst_z = z;
    }
  }
  rep.pass = rep.max_abs_discrepancy <= tol;
  return rep;
}

}  // namespace pdestab
