#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pdestab {

/// Error raised while parsing or evaluating a coefficient expression.
/// `offset` is the byte position in the source text for parse errors,
/// or npos for evaluation-time (domain) errors.
class ExprError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  ExprError(const std::string& msg, std::size_t offset = npos)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

enum class FuncId : unsigned char { sin, cos, tan, exp, log, sqrt, abs, pow, min, max };

/// Immutable scalar expression over a fixed, declared set of real variables.
///
/// Grammar (conventional precedence, loosest first):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | power
///   power  := atom ('^' factor)?          -- right associative
///   atom   := number | 'pi' | var | fn '(' expr {',' expr} ')' | '(' expr ')'
/// Functions: sin cos tan exp log sqrt abs (unary), pow min max (binary).
///
/// Variable references are resolved to slots at parse time, so evaluation
/// takes a value vector aligned with the declared variable order. Instances
/// are immutable after construction and freely shareable across threads.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view source, std::span<const std::string> variables);
  static Expr number(double v);

  bool empty() const { return root_ < 0; }

  /// Evaluate with values aligned to the declared variable order.
  double eval(std::span<const double> values) const;
  /// Evaluate with named bindings; every free variable must be bound.
  double eval(const std::map<std::string, double>& bindings) const;

  std::string to_string() const;
  const std::vector<std::string>& variables() const { return vars_; }
  std::vector<std::string> free_variables() const;
  bool depends_on(std::string_view name) const;
  bool is_constant() const;      // references no variable
  bool is_zero_literal() const;  // the literal 0 (possibly negated)

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  enum class Kind : unsigned char {
    number, pi_const, var, neg, add, sub, mul, div, pow_op, call1, call2
  };
  struct Node {
    Kind kind;
    double value = 0.0;
    int a = -1, b = -1;
    int slot = -1;
    FuncId fn = FuncId::sin;
  };

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;

  double eval_node(int idx, std::span<const double> values) const;
  void print_node(int idx, int min_prec, std::string& out) const;
  static bool node_equal(const Expr& x, int i, const Expr& y, int j);
  friend class ExprParser;
};

/// Result of comparing a claimed derivative against central finite
/// differences of f at n points of [lo, hi].
struct DerivativePairReport {
  bool pass = false;
  double max_abs_discrepancy = 0.0;
  double worst_z = 0.0;
  double tol = 0.0;
  int samples = 0;
};

DerivativePairReport check_derivative_pair(const Expr& f, const Expr& fz,
                                           double lo, double hi, int n, double tol);

}  // namespace pdestab
