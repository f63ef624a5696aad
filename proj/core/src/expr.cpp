#include "adiabat/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "adiabat/error.hpp"

namespace adiabat {

struct Expr::Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string id;
  Expr a{std::shared_ptr<const Node>{}};
  Expr b{std::shared_ptr<const Node>{}};
};

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double checked(double r, const char* what) {
  if (!std::isfinite(r)) throw DomainError(std::string("non-finite result in ") + what);
  return r;
}

double apply_binary(Expr::Kind op, double x, double y) {
  switch (op) {
    case Expr::Kind::Add: return x + y;
    case Expr::Kind::Sub: return x - y;
    case Expr::Kind::Mul: return x * y;
    case Expr::Kind::Div:
      if (y == 0.0) throw DomainError("division by zero");
      return x / y;
    case Expr::Kind::Pow: return checked(std::pow(x, y), "power");
    default: break;
  }
  throw Error("not a binary operator");
}

double apply_ln(double x) {
  if (!(x > 0.0)) throw DomainError("ln of non-positive value");
  return std::log(x);
}

}  // namespace

Expr::Expr() : node_(std::make_shared<Node>()) {}

Expr Expr::number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::name(std::string id) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Name;
  n->id = std::move(id);
  return Expr(std::move(n));
}

Expr Expr::negate(Expr arg) {
  if (arg.is_number()) return number(-arg.value());
  if (arg.kind() == Kind::Negate) return arg.lhs();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::exp(Expr arg) {
  if (arg.is_number() && std::isfinite(std::exp(arg.value()))) return number(std::exp(arg.value()));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::ln(Expr arg) {
  if (arg.is_number() && arg.value() > 0.0) return number(std::log(arg.value()));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Ln;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::binary(Kind op, Expr lhs, Expr rhs) {
  if (lhs.is_number() && rhs.is_number()) {
    const double x = lhs.value(), y = rhs.value();
    const bool foldable = !(op == Kind::Div && y == 0.0);
    if (foldable) {
      const double r = op == Kind::Pow ? std::pow(x, y) : apply_binary(op, x, y);
      if (std::isfinite(r)) return number(r);
    }
  }
  switch (op) {
    case Kind::Add:
      if (lhs.is_number(0.0)) return rhs;
      if (rhs.is_number(0.0)) return lhs;
      break;
    case Kind::Sub:
      if (rhs.is_number(0.0)) return lhs;
      if (lhs.is_number(0.0)) return negate(rhs);
      break;
    case Kind::Mul:
      if (lhs.is_number(0.0) || rhs.is_number(0.0)) return number(0.0);
      if (lhs.is_number(1.0)) return rhs;
      if (rhs.is_number(1.0)) return lhs;
      break;
    case Kind::Div:
      if (lhs.is_number(0.0)) return number(0.0);
      if (rhs.is_number(1.0)) return lhs;
      break;
    case Kind::Pow:
      if (rhs.is_number(1.0)) return lhs;
      if (rhs.is_number(0.0)) return number(1.0);
      break;
    default:
      throw Error("not a binary operator");
  }
  auto n = std::make_shared<Node>();
  n->kind = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::id() const { return node_->id; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

Expr operator+(Expr a, Expr b) { return Expr::binary(Expr::Kind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Expr::Kind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Expr::Kind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Expr::Kind::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

namespace {

void collect_names(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Number: return;
    case Expr::Kind::Name: out.insert(e.id()); return;
    case Expr::Kind::Negate:
    case Expr::Kind::Exp:
    case Expr::Kind::Ln: collect_names(e.lhs(), out); return;
    default:
      collect_names(e.lhs(), out);
      collect_names(e.rhs(), out);
  }
}

}  // namespace

std::set<std::string> Expr::free_names() const {
  std::set<std::string> out;
  collect_names(*this, out);
  return out;
}

double Expr::eval(const Bindings& b) const {
  switch (kind()) {
    case Kind::Number: return value();
    case Kind::Name: {
      auto it = b.find(id());
      if (it == b.end()) throw MissingBinding(id());
      return it->second;
    }
    case Kind::Negate: return -lhs().eval(b);
    case Kind::Exp: return checked(std::exp(lhs().eval(b)), "exp");
    case Kind::Ln: return apply_ln(lhs().eval(b));
    default: {
      const double x = lhs().eval(b);
      const double y = rhs().eval(b);
      return apply_binary(kind(), x, y);
    }
  }
}

Expr Expr::differentiate(std::string_view var) const {
  switch (kind()) {
    case Kind::Number: return number(0.0);
    case Kind::Name: return number(id() == var ? 1.0 : 0.0);
    case Kind::Negate: return -lhs().differentiate(var);
    case Kind::Add: return lhs().differentiate(var) + rhs().differentiate(var);
    case Kind::Sub: return lhs().differentiate(var) - rhs().differentiate(var);
    case Kind::Mul: {
      const Expr& f = lhs();
      const Expr& g = rhs();
      return f.differentiate(var) * g + f * g.differentiate(var);
    }
    case Kind::Div: {
      const Expr& f = lhs();
      const Expr& g = rhs();
      return (f.differentiate(var) * g - f * g.differentiate(var)) /
             binary(Kind::Pow, g, number(2.0));
    }
    case Kind::Pow: {
      const Expr& f = lhs();
      const Expr& g = rhs();
      if (!g.free_names().contains(std::string(var))) {
        return g * binary(Kind::Pow, f, g - number(1.0)) * f.differentiate(var);
      }
      return *this * (g.differentiate(var) * ln(f) + g * f.differentiate(var) / f);
    }
    case Kind::Exp: return *this * lhs().differentiate(var);
    case Kind::Ln: return lhs().differentiate(var) / lhs();
  }
  throw Error("corrupt expression");
}

Expr Expr::substitute(const Bindings& values) const {
  switch (kind()) {
    case Kind::Number: return *this;
    case Kind::Name: {
      auto it = values.find(id());
      return it == values.end() ? *this : number(it->second);
    }
    case Kind::Negate: return negate(lhs().substitute(values));
    case Kind::Exp: return exp(lhs().substitute(values));
    case Kind::Ln: return ln(lhs().substitute(values));
    default: return binary(kind(), lhs().substitute(values), rhs().substitute(values));
  }
}

namespace {

// Binding strength used by the printer; matches the parser's levels.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Negate: return 3;
    case Expr::Kind::Pow: return 4;
    case Expr::Kind::Number: return e.value() < 0 || std::signbit(e.value()) ? 3 : 5;
    default: return 5;
  }
}

void print(const Expr& e, int needed, std::string& out) {
  const bool paren = precedence(e) < needed;
  if (paren) out += '(';
  switch (e.kind()) {
    case Expr::Kind::Number: out += format_number(e.value()); break;
    case Expr::Kind::Name: out += e.id(); break;
    case Expr::Kind::Negate:
      out += '-';
      print(e.lhs(), 3, out);
      break;
    case Expr::Kind::Exp:
    case Expr::Kind::Ln:
      out += e.kind() == Expr::Kind::Exp ? "exp(" : "ln(";
      print(e.lhs(), 0, out);
      out += ')';
      break;
    case Expr::Kind::Pow:
      print(e.lhs(), 5, out);
      out += '^';
      print(e.rhs(), 3, out);
      break;
    default: {
      const int p = precedence(e);
      print(e.lhs(), p, out);
      switch (e.kind()) {
        case Expr::Kind::Add: out += " + "; break;
        case Expr::Kind::Sub: out += " - "; break;
        case Expr::Kind::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print(e.rhs(), p + 1, out);
    }
  }
  if (paren) out += ')';
}

enum class Tok { Number, Name, LParen, RParen, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok kind;
  std::size_t offset;
  double value = 0.0;
  std::string text;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Expr parse_all() {
    if (tok_.kind == Tok::End) throw SyntaxError("empty expression", 0);
    Expr e = expr();
    if (tok_.kind != Tok::End) throw SyntaxError("unexpected token", tok_.offset);
    return e;
  }

 private:
  Expr expr() {
    Expr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const auto op = tok_.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      advance();
      lhs = Expr::binary(op, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const auto op = tok_.kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div;
      advance();
      lhs = Expr::binary(op, lhs, unary());
    }
    return lhs;
  }

  Expr unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return Expr::negate(unary());
    }
    return power();
  }

  Expr power() {
    Expr b = base();
    if (tok_.kind == Tok::Caret) {
      advance();
      return Expr::binary(Expr::Kind::Pow, b, unary());
    }
    return b;
  }

  Expr base() {
    switch (tok_.kind) {
      case Tok::Number: {
        const double v = tok_.value;
        advance();
        return Expr::number(v);
      }
      case Tok::Name: {
        Token name = tok_;
        advance();
        if (tok_.kind != Tok::LParen) return Expr::name(name.text);
        if (name.text != "exp" && name.text != "ln") throw UnknownFunction(name.text, name.offset);
        advance();
        Expr arg = expr();
        expect_rparen();
        return name.text == "exp" ? Expr::exp(arg) : Expr::ln(arg);
      }
      case Tok::LParen: {
        advance();
        Expr inner = expr();
        expect_rparen();
        return inner;
      }
      case Tok::End:
        throw SyntaxError("unexpected end of input", last_offset_);
      default:
        throw SyntaxError("unexpected token", tok_.offset);
    }
  }

  void expect_rparen() {
    if (tok_.kind == Tok::RParen) {
      advance();
      return;
    }
    if (tok_.kind == Tok::End) throw SyntaxError("missing ')'", last_offset_);
    throw SyntaxError("expected ')'", tok_.offset);
  }

  void advance() {
    if (started_) last_offset_ = tok_.offset;
    started_ = true;
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_ = Token{Tok::End, pos_, 0.0, {}};
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (ec != std::errc()) throw SyntaxError("malformed number", pos_);
      tok_ = Token{Tok::Number, pos_, v, {}};
      pos_ = static_cast<std::size_t>(end - text_.data());
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      tok_ = Token{Tok::Name, pos_, 0.0, std::string(text_.substr(pos_, end - pos_))};
      pos_ = end;
      return;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      default: throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
    tok_ = Token{k, pos_, 0.0, {}};
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t last_offset_ = 0;
  bool started_ = false;
  Token tok_{Tok::End, 0, 0.0, {}};
};

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print(*this, 0, out);
  return out;
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> slots) {
  emit(e, slots, 1);
  if (max_depth_ > 64) throw Error("expression too deep to compile");
}

void CompiledExpr::emit(const Expr& e, std::span<const std::string> slots, int depth) {
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind()) {
    case Expr::Kind::Number:
      code_.push_back({Op::Const, 0, e.value()});
      return;
    case Expr::Kind::Name: {
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] == e.id()) {
          code_.push_back({Op::Var, static_cast<int>(i)});
          return;
        }
      }
      throw MissingBinding(e.id());
    }
    case Expr::Kind::Negate:
      emit(e.lhs(), slots, depth);
      code_.push_back({Op::Neg});
      return;
    case Expr::Kind::Exp:
    case Expr::Kind::Ln:
      emit(e.lhs(), slots, depth);
      code_.push_back({e.kind() == Expr::Kind::Exp ? Op::Exp : Op::Ln});
      return;
    case Expr::Kind::Pow:
      if (e.rhs().is_number()) {
        const double n = e.rhs().value();
        if (n == std::nearbyint(n) && std::abs(n) <= 64) {
          emit(e.lhs(), slots, depth);
          code_.push_back({Op::PowInt, static_cast<int>(n)});
          return;
        }
      }
      [[fallthrough]];
    default: {
      emit(e.lhs(), slots, depth);
      emit(e.rhs(), slots, depth + 1);
      Op op = Op::Add;
      switch (e.kind()) {
        case Expr::Kind::Add: op = Op::Add; break;
        case Expr::Kind::Sub: op = Op::Sub; break;
        case Expr::Kind::Mul: op = Op::Mul; break;
        case Expr::Kind::Div: op = Op::Div; break;
        default: op = Op::Pow; break;
      }
      code_.push_back({op});
    }
  }
}

double CompiledExpr::operator()(std::span<const double> values) const {
  std::array<double, 64> stack;
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: stack[++top] = in.value; break;
      case Op::Var: stack[++top] = values[static_cast<std::size_t>(in.arg)]; break;
      case Op::Neg: stack[top] = -stack[top]; break;
      case Op::Add: --top; stack[top] += stack[top + 1]; break;
      case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
      case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
      case Op::Div:
        --top;
        if (stack[top + 1] == 0.0) throw DomainError("division by zero");
        stack[top] /= stack[top + 1];
        break;
      case Op::Pow:
        --top;
        stack[top] = checked(std::pow(stack[top], stack[top + 1]), "power");
        break;
      case Op::PowInt: {
        double base = stack[top];
        int n = in.arg;
        const bool invert = n < 0;
        if (invert) {
          if (base == 0.0) throw DomainError("division by zero");
          n = -n;
        }
        double r = 1.0;
        while (n) {
          if (n & 1) r *= base;
          base *= base;
          n >>= 1;
        }
        stack[top] = invert ? 1.0 / r : r;
        break;
      }
      case Op::Exp: stack[top] = checked(std::exp(stack[top]), "exp"); break;
      case Op::Ln: stack[top] = apply_ln(stack[top]); break;
    }
  }
  return stack[0];
}

}  // namespace adiabat
