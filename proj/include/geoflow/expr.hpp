#pragma once

// Scalar expression trees with exact differentiation, point evaluation,
// tape compilation for fast repeated evaluation, and a round-trippable
// text format. Nodes are immutable and shared; simplification is limited
// to constant folding and neutral-element removal so derivatives stay
// structurally predictable.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace geoflow {

enum class ExprKind {
  Constant,
  Variable,
  Sum,
  Product,
  Quotient,
  Power,  // rational exponent p/q, q >= 1
  Log,
  Exp,
  Sin,
  Cos,
};

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprError : public std::runtime_error {
 public:
  explicit ExprError(const std::string& what) : std::runtime_error(what) {}
};

class ExprNode {
 public:
  ExprKind kind;
  double cval = 0.0;             // Constant
  std::string vname;             // Variable
  std::vector<Expr> kids;        // composite nodes
  long long pnum = 1, pden = 1;  // Power exponent

  static Expr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Constant;
    n->cval = v;
    return n;
  }
  static Expr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    n->vname = std::move(name);
    return n;
  }
  static Expr make(ExprKind k, std::vector<Expr> kids, long long pn = 1,
                   long long pd = 1) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->kids = std::move(kids);
    n->pnum = pn;
    n->pden = pd;
    return n;
  }

  bool is_constant(double v) const {
    return kind == ExprKind::Constant && cval == v;
  }
};

inline Expr constant(double v) { return ExprNode::make_constant(v); }
inline Expr variable(const std::string& name) {
  return ExprNode::make_variable(name);
}

inline Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  double c = 0.0;
  for (auto& t : terms) {
    if (t->kind == ExprKind::Sum) {
      for (auto& k : t->kids) {
        if (k->kind == ExprKind::Constant)
          c += k->cval;
        else
          flat.push_back(k);
      }
    } else if (t->kind == ExprKind::Constant) {
      c += t->cval;
    } else {
      flat.push_back(t);
    }
  }
  if (c != 0.0 || flat.empty()) flat.push_back(constant(c));
  if (flat.size() == 1) return flat[0];
  return ExprNode::make(ExprKind::Sum, std::move(flat));
}

inline Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  double c = 1.0;
  for (auto& f : factors) {
    if (f->kind == ExprKind::Product) {
      for (auto& k : f->kids) {
        if (k->kind == ExprKind::Constant)
          c *= k->cval;
        else
          flat.push_back(k);
      }
    } else if (f->kind == ExprKind::Constant) {
      c *= f->cval;
    } else {
      flat.push_back(f);
    }
  }
  if (c == 0.0) return constant(0.0);
  if (c != 1.0 || flat.empty()) flat.insert(flat.begin(), constant(c));
  if (flat.size() == 1) return flat[0];
  return ExprNode::make(ExprKind::Product, std::move(flat));
}

inline Expr add(const Expr& a, const Expr& b) { return sum({a, b}); }
inline Expr mul(const Expr& a, const Expr& b) { return product({a, b}); }
inline Expr neg(const Expr& a) { return mul(constant(-1.0), a); }
inline Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

inline Expr quotient(const Expr& num, const Expr& den) {
  if (num->is_constant(0.0)) return constant(0.0);
  if (den->is_constant(1.0)) return num;
  if (num->kind == ExprKind::Constant && den->kind == ExprKind::Constant &&
      den->cval != 0.0)
    return constant(num->cval / den->cval);
  return ExprNode::make(ExprKind::Quotient, {num, den});
}

inline long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

inline Expr pow_rational(const Expr& base, long long num, long long den = 1) {
  if (den == 0) throw ExprError("pow: zero exponent denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = gcd_ll(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) return constant(1.0);
  if (num == 1 && den == 1) return base;
  if (base->kind == ExprKind::Constant && den == 1) {
    double v = std::pow(base->cval, static_cast<double>(num));
    if (std::isfinite(v)) return constant(v);
  }
  return ExprNode::make(ExprKind::Power, {base}, num, den);
}

inline Expr pow_int(const Expr& base, long long n) {
  return pow_rational(base, n, 1);
}

inline Expr make_unary(ExprKind k, const Expr& a, double (*fold)(double)) {
  if (a->kind == ExprKind::Constant) {
    double v = fold(a->cval);
    if (std::isfinite(v)) return constant(v);
  }
  return ExprNode::make(k, {a});
}

inline Expr log_e(const Expr& a) {
  return make_unary(ExprKind::Log, a, [](double x) { return std::log(x); });
}
inline Expr exp_e(const Expr& a) {
  return make_unary(ExprKind::Exp, a, [](double x) { return std::exp(x); });
}
inline Expr sin_e(const Expr& a) {
  return make_unary(ExprKind::Sin, a, [](double x) { return std::sin(x); });
}
inline Expr cos_e(const Expr& a) {
  return make_unary(ExprKind::Cos, a, [](double x) { return std::cos(x); });
}

// ---------------------------------------------------------------------------
// Printing. Output parses back to a structurally identical tree.

namespace detail {

inline int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Sum:
      return 1;
    case ExprKind::Product:
    case ExprKind::Quotient:
      return 2;
    case ExprKind::Power:
      return 3;
    default:
      return 4;
  }
}

inline void print_number(std::ostream& os, double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
    os << static_cast<long long>(v);
  } else {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  }
}

inline void print_rec(std::ostream& os, const Expr& e, int parent_prec) {
  int prec = precedence(e->kind);
  bool paren = prec < parent_prec;
  if (e->kind == ExprKind::Constant && e->cval < 0) paren = parent_prec > 1;
  if (paren) os << "(";
  switch (e->kind) {
    case ExprKind::Constant:
      print_number(os, e->cval);
      break;
    case ExprKind::Variable:
      os << e->vname;
      break;
    case ExprKind::Sum:
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << " + ";
        print_rec(os, e->kids[i], 1);
      }
      break;
    case ExprKind::Product:
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << "*";
        print_rec(os, e->kids[i], 2 + (i ? 1 : 0));
      }
      break;
    case ExprKind::Quotient:
      print_rec(os, e->kids[0], 2);
      os << "/";
      print_rec(os, e->kids[1], 3);
      break;
    case ExprKind::Power:
      print_rec(os, e->kids[0], 4);
      os << "^";
      if (e->pden == 1 && e->pnum > 0) {
        os << e->pnum;
      } else {
        os << "(" << e->pnum;
        if (e->pden != 1) os << "/" << e->pden;
        os << ")";
      }
      break;
    case ExprKind::Log:
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos: {
      const char* names[] = {"log", "exp", "sin", "cos"};
      os << names[static_cast<int>(e->kind) - static_cast<int>(ExprKind::Log)];
      os << "(";
      print_rec(os, e->kids[0], 0);
      os << ")";
      break;
    }
  }
  if (paren) os << ")";
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::ostringstream os;
  detail::print_rec(os, e, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing: infix grammar with +,-,*,/,^, parentheses, log/exp/sin/cos.

namespace detail {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size())
      fail("unexpected trailing input at position " + std::to_string(pos_));
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw ExprError("parse error: " + msg + " in \"" + s_ + "\"");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr parse_sum() {
    std::vector<Expr> terms;
    bool negate = eat('-');
    Expr first = parse_term();
    terms.push_back(negate ? neg(first) : first);
    for (;;) {
      if (eat('+'))
        terms.push_back(parse_term());
      else if (eat('-'))
        terms.push_back(neg(parse_term()));
      else
        break;
    }
    return terms.size() == 1 ? terms[0] : sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    for (;;) {
      if (eat('*'))
        acc = mul(acc, parse_factor());
      else if (eat('/'))
        acc = quotient(acc, parse_factor());
      else
        break;
    }
    return acc;
  }

  Expr parse_factor() {
    if (eat('-')) return neg(parse_factor());
    Expr base = parse_atom();
    if (eat('^')) {
      auto [num, den] = parse_exponent();
      return pow_rational(base, num, den);
    }
    return base;
  }

  std::pair<long long, long long> parse_exponent() {
    skip_ws();
    if (eat('(')) {
      long long num = parse_integer();
      long long den = 1;
      if (eat('/')) den = parse_integer();
      if (!eat(')')) fail("expected ')' after exponent");
      return {num, den};
    }
    return {parse_integer(), 1};
  }

  long long parse_integer() {
    skip_ws();
    bool negative = eat('-');
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected integer exponent");
    long long v = std::stoll(s_.substr(start, pos_ - start));
    return negative ? -v : v;
  }

  Expr parse_atom() {
    skip_ws();
    if (eat('(')) {
      Expr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t epos = pos_ + 1;
      if (epos < s_.size() && (s_[epos] == '+' || s_[epos] == '-')) ++epos;
      if (epos < s_.size() && std::isdigit(static_cast<unsigned char>(s_[epos]))) {
        pos_ = epos;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
      }
    }
    return constant(std::stod(s_.substr(start, pos_ - start)));
  }

  Expr parse_ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "log" || name == "exp" || name == "sin" || name == "cos") {
      if (!eat('(')) fail("expected '(' after " + name);
      Expr arg = parse_sum();
      if (!eat(')')) fail("expected ')' after " + name + " argument");
      if (name == "log") return log_e(arg);
      if (name == "exp") return exp_e(arg);
      if (name == "sin") return sin_e(arg);
      return cos_e(arg);
    }
    return variable(name);
  }
};

}  // namespace detail

inline Expr parse(const std::string& text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Differentiation. Exact, memoized over shared subtrees per call.
// A derivative table maps variable names to their derivative expressions,
// enabling chain-rule differentiation through fields (e.g. d a0/dt = a0_t).

using DerivTable = std::map<std::string, Expr>;

namespace detail {

inline Expr diff_rec(const Expr& e, const std::string& var,
                     const DerivTable* table,
                     std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  Expr result;
  switch (e->kind) {
    case ExprKind::Constant:
      result = constant(0.0);
      break;
    case ExprKind::Variable:
      if (e->vname == var) {
        result = constant(1.0);
      } else if (table) {
        auto t = table->find(e->vname);
        result = t != table->end() ? t->second : constant(0.0);
      } else {
        result = constant(0.0);
      }
      break;
    case ExprKind::Sum: {
      std::vector<Expr> parts;
      parts.reserve(e->kids.size());
      for (auto& k : e->kids) parts.push_back(diff_rec(k, var, table, memo));
      result = sum(std::move(parts));
      break;
    }
    case ExprKind::Product: {
      std::vector<Expr> terms;
      for (size_t i = 0; i < e->kids.size(); ++i) {
        Expr di = diff_rec(e->kids[i], var, table, memo);
        if (di->is_constant(0.0)) continue;
        std::vector<Expr> factors;
        factors.push_back(di);
        for (size_t j = 0; j < e->kids.size(); ++j)
          if (j != i) factors.push_back(e->kids[j]);
        terms.push_back(product(std::move(factors)));
      }
      result = sum(std::move(terms));
      break;
    }
    case ExprKind::Quotient: {
      const Expr& u = e->kids[0];
      const Expr& v = e->kids[1];
      Expr du = diff_rec(u, var, table, memo);
      Expr dv = diff_rec(v, var, table, memo);
      result = quotient(sub(mul(du, v), mul(u, dv)), pow_int(v, 2));
      break;
    }
    case ExprKind::Power: {
      const Expr& b = e->kids[0];
      Expr db = diff_rec(b, var, table, memo);
      Expr coeff = quotient(constant(static_cast<double>(e->pnum)),
                            constant(static_cast<double>(e->pden)));
      result = product(
          {coeff, pow_rational(b, e->pnum - e->pden, e->pden), db});
      break;
    }
    case ExprKind::Log:
      result = quotient(diff_rec(e->kids[0], var, table, memo), e->kids[0]);
      break;
    case ExprKind::Exp:
      result = mul(exp_e(e->kids[0]), diff_rec(e->kids[0], var, table, memo));
      break;
    case ExprKind::Sin:
      result = mul(cos_e(e->kids[0]), diff_rec(e->kids[0], var, table, memo));
      break;
    case ExprKind::Cos:
      result = mul(neg(sin_e(e->kids[0])),
                   diff_rec(e->kids[0], var, table, memo));
      break;
  }
  memo.emplace(e.get(), result);
  return result;
}

}  // namespace detail

inline Expr differentiate(const Expr& e, const std::string& var) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return detail::diff_rec(e, var, nullptr, memo);
}

inline Expr differentiate(const Expr& e, const std::string& var,
                          const DerivTable& table) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return detail::diff_rec(e, var, &table, memo);
}

// ---------------------------------------------------------------------------
// Substitution (memoized).

namespace detail {

inline Expr subst_rec(const Expr& e,
                      const std::map<std::string, Expr>& repl,
                      std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  Expr result;
  switch (e->kind) {
    case ExprKind::Constant:
      result = e;
      break;
    case ExprKind::Variable: {
      auto r = repl.find(e->vname);
      result = r != repl.end() ? r->second : e;
      break;
    }
    default: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      bool changed = false;
      for (auto& k : e->kids) {
        Expr nk = subst_rec(k, repl, memo);
        changed |= (nk.get() != k.get());
        kids.push_back(nk);
      }
      if (!changed) {
        result = e;
      } else {
        switch (e->kind) {
          case ExprKind::Sum:
            result = sum(std::move(kids));
            break;
          case ExprKind::Product:
            result = product(std::move(kids));
            break;
          case ExprKind::Quotient:
            result = quotient(kids[0], kids[1]);
            break;
          case ExprKind::Power:
            result = pow_rational(kids[0], e->pnum, e->pden);
            break;
          case ExprKind::Log:
            result = log_e(kids[0]);
            break;
          case ExprKind::Exp:
            result = exp_e(kids[0]);
            break;
          case ExprKind::Sin:
            result = sin_e(kids[0]);
            break;
          case ExprKind::Cos:
            result = cos_e(kids[0]);
            break;
          default:
            result = e;
        }
      }
    }
  }
  memo.emplace(e.get(), result);
  return result;
}

}  // namespace detail

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return detail::subst_rec(e, repl, memo);
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::Variable) out.insert(e->vname);
  for (auto& k : e->kids) collect_variables(k, out);
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Strict evaluation: reports the offending subexpression on domain errors.
// Accumulates in long double so that residuals of identities that cancel
// large terms stay near machine precision of the inputs.

using Assignment = std::map<std::string, double>;

namespace detail {

inline long double eval_rec(
    const Expr& e, const Assignment& vals,
    std::unordered_map<const ExprNode*, long double>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  auto domain_fail = [&](const std::string& why) -> long double {
    throw ExprError(why + " in subexpression: " + to_string(e));
  };
  long double result = 0.0L;
  switch (e->kind) {
    case ExprKind::Constant:
      result = e->cval;
      break;
    case ExprKind::Variable: {
      auto v = vals.find(e->vname);
      if (v == vals.end())
        throw ExprError("unassigned variable '" + e->vname + "'");
      result = v->second;
      break;
    }
    case ExprKind::Sum:
      for (auto& k : e->kids) result += eval_rec(k, vals, memo);
      break;
    case ExprKind::Product:
      result = 1.0L;
      for (auto& k : e->kids) result *= eval_rec(k, vals, memo);
      break;
    case ExprKind::Quotient: {
      long double num = eval_rec(e->kids[0], vals, memo);
      long double den = eval_rec(e->kids[1], vals, memo);
      if (den == 0.0L) return domain_fail("division by zero");
      result = num / den;
      break;
    }
    case ExprKind::Power: {
      long double b = eval_rec(e->kids[0], vals, memo);
      if (e->pden == 1) {
        if (b == 0.0L && e->pnum < 0)
          return domain_fail("zero base with negative exponent");
        result = std::pow(b, static_cast<long double>(e->pnum));
      } else {
        if (b < 0.0L)
          return domain_fail("negative base with fractional exponent");
        if (b == 0.0L && e->pnum < 0)
          return domain_fail("zero base with negative exponent");
        result = std::pow(b, static_cast<long double>(e->pnum) /
                                 static_cast<long double>(e->pden));
      }
      break;
    }
    case ExprKind::Log: {
      long double a = eval_rec(e->kids[0], vals, memo);
      if (a <= 0.0L) return domain_fail("log of non-positive value");
      result = std::log(a);
      break;
    }
    case ExprKind::Exp:
      result = std::exp(eval_rec(e->kids[0], vals, memo));
      break;
    case ExprKind::Sin:
      result = std::sin(eval_rec(e->kids[0], vals, memo));
      break;
    case ExprKind::Cos:
      result = std::cos(eval_rec(e->kids[0], vals, memo));
      break;
  }
  memo.emplace(e.get(), result);
  return result;
}

}  // namespace detail

inline double evaluate(const Expr& e, const Assignment& vals) {
  std::unordered_map<const ExprNode*, long double> memo;
  return static_cast<double>(detail::eval_rec(e, vals, memo));
}

// ---------------------------------------------------------------------------
// Tape compilation. Shared subtrees are computed once; evaluation walks a
// flat instruction vector. Domain violations yield NaN/Inf (callers check
// std::isfinite) rather than throwing, which suits Newton line searches.

class CompiledExpr {
 public:
  CompiledExpr() = default;

  CompiledExpr(const Expr& e, const std::vector<std::string>& var_order) {
    nvars_ = var_order.size();
    std::map<std::string, int> slot_of;
    for (size_t i = 0; i < var_order.size(); ++i)
      slot_of[var_order[i]] = static_cast<int>(i);
    std::unordered_map<const ExprNode*, int> seen;
    root_ = build(e, slot_of, seen);
    scratch_.resize(tape_.size());
  }

  // vals must hold one value per variable in the order given at compile time.
  double eval(const double* vals) const {
    for (size_t i = 0; i < tape_.size(); ++i) {
      const Instr& in = tape_[i];
      double a = in.a >= 0 ? scratch_[in.a] : 0.0;
      double b = in.b >= 0 ? scratch_[in.b] : 0.0;
      double r = 0.0;
      switch (in.op) {
        case Op::Const:
          r = in.c;
          break;
        case Op::Var:
          r = vals[in.slot];
          break;
        case Op::Add:
          r = a + b;
          break;
        case Op::Mul:
          r = a * b;
          break;
        case Op::Div:
          r = a / b;
          break;
        case Op::PowInt:
          r = std::pow(a, static_cast<double>(in.slot));
          break;
        case Op::PowRat:
          r = std::pow(a, in.c);
          break;
        case Op::Log:
          r = std::log(a);
          break;
        case Op::Exp:
          r = std::exp(a);
          break;
        case Op::Sin:
          r = std::sin(a);
          break;
        case Op::Cos:
          r = std::cos(a);
          break;
      }
      scratch_[i] = r;
    }
    return root_ >= 0 ? scratch_[root_] : 0.0;
  }

  double eval(const std::vector<double>& vals) const { return eval(vals.data()); }

  size_t size() const { return tape_.size(); }
  size_t num_vars() const { return nvars_; }

 private:
  enum class Op { Const, Var, Add, Mul, Div, PowInt, PowRat, Log, Exp, Sin, Cos };
  struct Instr {
    Op op;
    int a = -1, b = -1;
    int slot = 0;
    double c = 0.0;
  };

  int emit(Instr in) {
    tape_.push_back(in);
    return static_cast<int>(tape_.size() - 1);
  }

  int build(const Expr& e, const std::map<std::string, int>& slot_of,
            std::unordered_map<const ExprNode*, int>& seen) {
    auto it = seen.find(e.get());
    if (it != seen.end()) return it->second;
    int idx = -1;
    switch (e->kind) {
      case ExprKind::Constant:
        idx = emit({Op::Const, -1, -1, 0, e->cval});
        break;
      case ExprKind::Variable: {
        auto s = slot_of.find(e->vname);
        if (s == slot_of.end())
          throw ExprError("compile: variable '" + e->vname +
                          "' not in variable order");
        idx = emit({Op::Var, -1, -1, s->second, 0.0});
        break;
      }
      case ExprKind::Sum: {
        idx = build(e->kids[0], slot_of, seen);
        for (size_t i = 1; i < e->kids.size(); ++i) {
          int rhs = build(e->kids[i], slot_of, seen);
          idx = emit({Op::Add, idx, rhs, 0, 0.0});
        }
        break;
      }
      case ExprKind::Product: {
        idx = build(e->kids[0], slot_of, seen);
        for (size_t i = 1; i < e->kids.size(); ++i) {
          int rhs = build(e->kids[i], slot_of, seen);
          idx = emit({Op::Mul, idx, rhs, 0, 0.0});
        }
        break;
      }
      case ExprKind::Quotient: {
        int a = build(e->kids[0], slot_of, seen);
        int b = build(e->kids[1], slot_of, seen);
        idx = emit({Op::Div, a, b, 0, 0.0});
        break;
      }
      case ExprKind::Power: {
        int a = build(e->kids[0], slot_of, seen);
        if (e->pden == 1 && std::abs(e->pnum) <= 64) {
          idx = emit({Op::PowInt, a, -1, static_cast<int>(e->pnum), 0.0});
        } else {
          idx = emit({Op::PowRat, a, -1, 0,
                      static_cast<double>(e->pnum) /
                          static_cast<double>(e->pden)});
        }
        break;
      }
      case ExprKind::Log: {
        int a = build(e->kids[0], slot_of, seen);
        idx = emit({Op::Log, a, -1, 0, 0.0});
        break;
      }
      case ExprKind::Exp: {
        int a = build(e->kids[0], slot_of, seen);
        idx = emit({Op::Exp, a, -1, 0, 0.0});
        break;
      }
      case ExprKind::Sin: {
        int a = build(e->kids[0], slot_of, seen);
        idx = emit({Op::Sin, a, -1, 0, 0.0});
        break;
      }
      case ExprKind::Cos: {
        int a = build(e->kids[0], slot_of, seen);
        idx = emit({Op::Cos, a, -1, 0, 0.0});
        break;
      }
    }
    seen.emplace(e.get(), idx);
    return idx;
  }

  std::vector<Instr> tape_;
  mutable std::vector<double> scratch_;
  int root_ = -1;
  size_t nvars_ = 0;
};

}  // namespace geoflow
