#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adiabat {

using Bindings = std::map<std::string, double, std::less<>>;

/// Immutable expression tree over numeric literals, names, the binary
/// operators + - * / ^, unary minus and the functions exp and ln.
///
/// Copies share structure. Construction helpers fold constant subtrees, so
/// derivatives of separable expressions collapse to plain numbers.
class Expr {
 public:
  enum class Kind { Number, Name, Negate, Add, Sub, Mul, Div, Pow, Exp, Ln };

  Expr();  // the literal 0

  static Expr number(double value);
  static Expr name(std::string id);
  static Expr negate(Expr arg);
  static Expr exp(Expr arg);
  static Expr ln(Expr arg);
  static Expr binary(Kind op, Expr lhs, Expr rhs);

  Kind kind() const;
  double value() const;            // Number only
  const std::string& id() const;   // Name only
  const Expr& lhs() const;         // binary nodes; unary argument for Negate/Exp/Ln
  const Expr& rhs() const;         // binary nodes

  bool is_number() const { return kind() == Kind::Number; }
  bool is_number(double v) const { return is_number() && value() == v; }

  std::set<std::string> free_names() const;

  /// Double-precision evaluation. Throws MissingBinding or DomainError.
  double eval(const Bindings& b) const;

  /// Exact symbolic derivative with respect to `var`.
  Expr differentiate(std::string_view var) const;

  /// Replaces every name bound in `values` by its number and refolds.
  Expr substitute(const Bindings& values) const;

  /// Text that parses back to an equivalent tree.
  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses `text` per
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := base ('^' unary)?
///   base  := number | name | name '(' expr ')' | '(' expr ')'
/// Throws SyntaxError (with byte offset) or UnknownFunction.
Expr parse(std::string_view text);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

/// Flattened postfix form of an Expr over a fixed list of variable slots.
/// Evaluation is allocation-free; used on the hot paths of the integrators.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Every free name of `e` must appear in `slots`.
  CompiledExpr(const Expr& e, std::span<const std::string> slots);

  double operator()(std::span<const double> values) const;
  double operator()(double a, double b) const {
    const double v[2] = {a, b};
    return (*this)(std::span<const double>(v, 2));
  }

  bool is_constant() const { return code_.size() == 1 && code_[0].op == Op::Const; }

 private:
  enum class Op : unsigned char { Const, Var, Neg, Add, Sub, Mul, Div, Pow, PowInt, Exp, Ln };
  struct Instr {
    Op op;
    int arg = 0;      // slot index or integer exponent
    double value = 0; // Const
  };
  void emit(const Expr& e, std::span<const std::string> slots, int depth);

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace adiabat
