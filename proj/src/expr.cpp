#include "famdyn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "famdyn/polynomial.hpp"

namespace famdyn {

namespace {

Expr node(Op op) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  return n;
}

}  // namespace

Expr e_var() {
  static Expr v = node(Op::var);
  return v;
}
Expr e_index() {
  static Expr v = node(Op::index);
  return v;
}
Expr e_lit(Complex c) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::lit;
  n->lit = c;
  return n;
}
Expr e_lit(double re, double im) { return e_lit(Complex(re, im)); }
Expr e_param(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::param;
  n->name = name;
  return n;
}

namespace {
Expr binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
}  // namespace

Expr e_add(Expr a, Expr b) { return binary(Op::add, std::move(a), std::move(b)); }
Expr e_sub(Expr a, Expr b) { return binary(Op::sub, std::move(a), std::move(b)); }
Expr e_mul(Expr a, Expr b) { return binary(Op::mul, std::move(a), std::move(b)); }
Expr e_div(Expr a, Expr b) { return binary(Op::div_, std::move(a), std::move(b)); }
Expr e_neg(Expr a) {
  auto n = node(Op::neg);
  const_cast<ExprNode*>(n.get())->a = std::move(a);
  return n;
}
Expr e_pow(Expr a, PowExp e) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::pow_;
  n->pe = e;
  n->a = std::move(a);
  return n;
}
Expr e_pow(Expr a, long k) { return e_pow(std::move(a), PowExp{k, 0}); }
Expr e_exp(Expr a) {
  auto n = node(Op::exp_);
  const_cast<ExprNode*>(n.get())->a = std::move(a);
  return n;
}
Expr e_compose(Expr outer, Expr inner) {
  return binary(Op::compose, std::move(outer), std::move(inner));
}

// --- parser -----------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& what, size_t at) {
    throw Error(Errc::parse,
                what + " at offset " + std::to_string(at), static_cast<long>(at));
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c)) fail(std::string("expected '") + c + "'", pos);
  }

  // number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
  bool scan_number(double& out, size_t& at) {
    skip_ws();
    at = pos;
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      return false;
    size_t p = pos;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p < s.size() && s[p] == '.') {
      ++p;
      if (p >= s.size() || !std::isdigit(static_cast<unsigned char>(s[p])))
        fail("digits expected after decimal point", p);
      while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    }
    if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
      size_t q = p + 1;
      if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
      if (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
        ++q;
        while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) ++q;
        p = q;
      }
    }
    out = std::strtod(s.c_str() + pos, nullptr);
    pos = p;
    return true;
  }

  bool scan_ident(std::string& out, size_t& at) {
    skip_ws();
    at = pos;
    if (pos >= s.size()) return false;
    char c = s[pos];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return false;
    size_t p = pos;
    while (p < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_'))
      ++p;
    out.assign(s, pos, p - pos);
    pos = p;
    return true;
  }

  Expr parse_full() {
    Expr e = parse_sum();
    skip_ws();
    if (pos != s.size()) fail("unexpected input", pos);
    return e;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = e_add(e, parse_term());
      else if (accept('-'))
        e = e_sub(e, parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = e_mul(e, parse_factor());
      else if (accept('/'))
        e = e_div(e, parse_factor());
      else
        return e;
    }
  }

  Expr parse_factor() {
    if (accept('-')) return e_neg(parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (!accept('^')) return base;
    PowExp pe = parse_exponent();
    // right-associative constant towers: a^2^3 == a^(2^3)
    while (peek('^')) {
      size_t at = pos;
      ++pos;
      PowExp nxt = parse_exponent();
      if (!pe.is_const() || !nxt.is_const())
        fail("index exponent cannot be nested", at);
      double folded = std::pow(static_cast<double>(pe.c0),
                               static_cast<double>(nxt.c0));
      if (std::abs(folded) > 1e15) fail("exponent overflow", at);
      pe.c0 = static_cast<long>(folded);
    }
    return e_pow(base, pe);
  }

  // exponent := ['-'] (INT | 'n' | '(' signed-exponent-sum ')')
  PowExp parse_exponent() {
    skip_ws();
    bool negate = accept('-');
    PowExp pe{};
    size_t at = pos;
    double num;
    std::string id;
    if (accept('(')) {
      pe = parse_exponent_sum();
      expect(')');
    } else if (scan_number(num, at)) {
      pe.c0 = require_integer(num, at);
    } else if (scan_ident(id, at)) {
      if (id != "n") fail("exponent must be an integer or n", at);
      pe.cn = 1;
    } else {
      fail("exponent expected", pos);
    }
    if (negate) {
      pe.c0 = -pe.c0;
      pe.cn = -pe.cn;
    }
    return pe;
  }

  PowExp parse_exponent_sum() {
    PowExp pe = parse_exponent_leaf(accept('-'));
    for (;;) {
      if (accept('+')) {
        PowExp r = parse_exponent_leaf(false);
        pe.c0 += r.c0;
        pe.cn += r.cn;
      } else if (accept('-')) {
        PowExp r = parse_exponent_leaf(false);
        pe.c0 -= r.c0;
        pe.cn -= r.cn;
      } else {
        return pe;
      }
    }
  }

  PowExp parse_exponent_leaf(bool negate) {
    skip_ws();
    size_t at = pos;
    PowExp pe{};
    double num;
    std::string id;
    if (scan_number(num, at)) {
      long k = require_integer(num, at);
      // allow 2*n inside parenthesised exponents
      if (accept('*')) {
        size_t at2 = pos;
        if (!scan_ident(id, at2) || id != "n")
          fail("exponent must be an integer or a multiple of n", at2);
        pe.cn = k;
      } else {
        pe.c0 = k;
      }
    } else if (scan_ident(id, at)) {
      if (id != "n") fail("exponent must be an integer or n", at);
      pe.cn = 1;
    } else {
      fail("exponent expected", pos);
    }
    if (negate) {
      pe.c0 = -pe.c0;
      pe.cn = -pe.cn;
    }
    return pe;
  }

  long require_integer(double v, size_t at) {
    if (v != std::floor(v) || std::abs(v) > 1e15)
      fail("non-integer exponent", at);
    return static_cast<long>(v);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("expression expected", pos);
    double num;
    size_t at;
    if (scan_number(num, at)) return e_lit(num);
    std::string id;
    if (scan_ident(id, at)) {
      if (id == "z") return e_var();
      if (id == "n") return e_index();
      if (id == "i") return e_lit(0.0, 1.0);
      if (id == "exp") {
        expect('(');
        Expr arg = parse_sum();
        expect(')');
        return e_exp(arg);
      }
      return e_param(id);
    }
    if (accept('(')) {
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    fail("unexpected character", pos);
  }
};

}  // namespace

Expr parse_expr(const std::string& text) {
  Parser p(text);
  return canonical(p.parse_full());
}

// --- printing ---------------------------------------------------------------

namespace {

// precedence levels: 1 sum, 2 term, 3 unary, 4 power, 5 atom
int precedence(const Expr& e) {
  switch (e->op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div_:
      return 2;
    case Op::neg:
      return 3;
    case Op::pow_:
      return 4;
    case Op::lit:
      if (e->lit.imag() != 0.0) return 0;  // prints self-parenthesised or as product
      if (e->lit.real() < 0.0) return 3;   // prints with leading '-'
      return 5;
    default:
      return 5;
  }
}

std::string print_rec(const Expr& e, const std::string& zsub);

std::string child(const Expr& e, const std::string& zsub, int minprec,
                  bool strict) {
  int p = precedence(e);
  std::string s = print_rec(e, zsub);
  if (p < minprec || (strict && p == minprec)) return "(" + s + ")";
  return s;
}

std::string print_exponent(const PowExp& pe) {
  if (pe.is_const()) {
    if (pe.c0 < 0) return "(-" + std::to_string(-pe.c0) + ")";
    return std::to_string(pe.c0);
  }
  if (pe.c0 == 0 && pe.cn == 1) return "n";
  std::string s = "(";
  if (pe.cn == 1)
    s += "n";
  else if (pe.cn == -1)
    s += "-n";
  else
    s += std::to_string(pe.cn) + "*n";
  if (pe.c0 > 0)
    s += "+" + std::to_string(pe.c0);
  else if (pe.c0 < 0)
    s += "-" + std::to_string(-pe.c0);
  return s + ")";
}

std::string print_lit(const Complex& c) {
  double re = c.real(), im = c.imag();
  if (im == 0.0) {
    if (re < 0.0) return "-" + format_double(-re);
    return format_double(re);
  }
  if (re == 0.0) {
    if (im == 1.0) return "i";
    if (im == -1.0) return "-i";
    if (im < 0.0) return "-" + format_double(-im) + "*i";
    return format_double(im) + "*i";
  }
  std::string s = "(";
  s += (re < 0.0 ? "-" + format_double(-re) : format_double(re));
  s += (im < 0.0 ? "-" : "+");
  double aim = std::abs(im);
  s += (aim == 1.0 ? "i" : format_double(aim) + "*i");
  return s + ")";
}

std::string print_rec(const Expr& e, const std::string& zsub) {
  switch (e->op) {
    case Op::var:
      return zsub.empty() ? "z" : zsub;
    case Op::index:
      return "n";
    case Op::lit:
      return print_lit(e->lit);
    case Op::param:
      return e->name;
    case Op::add:
      return child(e->a, zsub, 1, false) + "+" + child(e->b, zsub, 1, true);
    case Op::sub:
      return child(e->a, zsub, 1, false) + "-" + child(e->b, zsub, 1, true);
    case Op::mul:
      return child(e->a, zsub, 2, false) + "*" + child(e->b, zsub, 2, true);
    case Op::div_:
      return child(e->a, zsub, 2, false) + "/" + child(e->b, zsub, 2, true);
    case Op::neg:
      return "-" + child(e->a, zsub, 3, false);
    case Op::pow_:
      return child(e->a, zsub, 5, false) + "^" + print_exponent(e->pe);
    case Op::exp_:
      return "exp(" + print_rec(e->a, zsub) + ")";
    case Op::compose: {
      std::string inner = "(" + print_rec(e->b, zsub) + ")";
      return print_rec(e->a, inner);
    }
  }
  return "?";
}

}  // namespace

std::string print_expr(const Expr& e) { return print_rec(e, ""); }

// --- structure --------------------------------------------------------------

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::var:
    case Op::index:
      return true;
    case Op::lit:
      return a->lit == b->lit;
    case Op::param:
      return a->name == b->name;
    case Op::neg:
    case Op::exp_:
      return expr_equal(a->a, b->a);
    case Op::pow_:
      return a->pe.c0 == b->pe.c0 && a->pe.cn == b->pe.cn &&
             expr_equal(a->a, b->a);
    default:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
  }
}

std::size_t expr_size(const Expr& e) {
  if (!e) return 0;
  std::size_t n = 1;
  if (e->a) n += expr_size(e->a);
  if (e->b) n += expr_size(e->b);
  return n;
}

// --- canonical form ---------------------------------------------------------

namespace {

std::optional<Complex> lit_of(const Expr& e) {
  if (e->op == Op::lit) return e->lit;
  return std::nullopt;
}

// substitute g for the variable in f
Expr substitute_var(const Expr& f, const Expr& g) {
  switch (f->op) {
    case Op::var:
      return g;
    case Op::index:
    case Op::lit:
    case Op::param:
      return f;
    case Op::neg:
      return e_neg(substitute_var(f->a, g));
    case Op::exp_:
      return e_exp(substitute_var(f->a, g));
    case Op::pow_:
      return e_pow(substitute_var(f->a, g), f->pe);
    case Op::compose:
      // (a o b) with z := g  ==  a o (b with z := g)
      return e_compose(f->a, substitute_var(f->b, g));
    default:
      return binary(f->op, substitute_var(f->a, g), substitute_var(f->b, g));
  }
}

// f == alpha*z + beta (syntactically, after canonicalisation of children)?
bool is_affine(const Expr& f) {
  switch (f->op) {
    case Op::var:
    case Op::lit:
      return true;
    case Op::neg:
      return is_affine(f->a);
    case Op::add:
    case Op::sub:
      return is_affine(f->a) && is_affine(f->b);
    case Op::mul:
      return (f->a->op == Op::lit && is_affine(f->b)) ||
             (f->b->op == Op::lit && is_affine(f->a));
    default:
      return false;
  }
}

Expr canon(const Expr& e);

Expr canon_children(const Expr& e) {
  switch (e->op) {
    case Op::var:
    case Op::index:
    case Op::lit:
    case Op::param:
      return e;
    case Op::neg:
      return e_neg(canon(e->a));
    case Op::exp_:
      return e_exp(canon(e->a));
    case Op::pow_:
      return e_pow(canon(e->a), e->pe);
    default:
      return binary(e->op, canon(e->a), canon(e->b));
  }
}

Expr canon(const Expr& e0) {
  Expr e = canon_children(e0);
  switch (e->op) {
    case Op::add: {
      auto la = lit_of(e->a), lb = lit_of(e->b);
      if (la && lb) {
        try {
          XC r = xc_add(XC(*la), XC(*lb));
          if (!r.is_inf()) return e_lit(r.value());
        } catch (const Error&) {}
      }
      if (la && *la == Complex(0, 0)) return e->b;
      if (lb && *lb == Complex(0, 0)) return e->a;
      return e;
    }
    case Op::sub: {
      auto la = lit_of(e->a), lb = lit_of(e->b);
      if (la && lb) {
        try {
          XC r = xc_sub(XC(*la), XC(*lb));
          if (!r.is_inf()) return e_lit(r.value());
        } catch (const Error&) {}
      }
      if (lb && *lb == Complex(0, 0)) return e->a;
      if (la && *la == Complex(0, 0)) return canon(e_neg(e->b));
      return e;
    }
    case Op::mul: {
      auto la = lit_of(e->a), lb = lit_of(e->b);
      if (la && lb) {
        try {
          XC r = xc_mul(XC(*la), XC(*lb));
          if (!r.is_inf()) return e_lit(r.value());
        } catch (const Error&) {}
      }
      // 0*f == 0 and 1*f == f as meromorphic identities
      if (la) {
        if (*la == Complex(0, 0)) return e_lit(0.0);
        if (*la == Complex(1, 0)) return e->b;
      }
      if (lb) {
        if (*lb == Complex(0, 0)) return e_lit(0.0);
        if (*lb == Complex(1, 0)) return e->a;
      }
      return e;
    }
    case Op::div_: {
      auto la = lit_of(e->a), lb = lit_of(e->b);
      if (la && lb && *lb != Complex(0, 0)) {
        try {
          XC r = xc_div(XC(*la), XC(*lb));
          if (!r.is_inf()) return e_lit(r.value());
        } catch (const Error&) {}
      }
      if (lb && *lb == Complex(1, 0)) return e->a;
      if (la && *la == Complex(0, 0)) return e_lit(0.0);
      return e;
    }
    case Op::neg: {
      if (e->a->op == Op::neg) return e->a->a;
      if (auto l = lit_of(e->a)) return e_lit(-*l);
      return e;
    }
    case Op::pow_: {
      if (e->pe.is_const()) {
        long k = e->pe.c0;
        if (k == 0) return e_lit(1.0);
        if (k == 1) return e->a;
        if (k < 0) return canon(e_div(e_lit(1.0), e_pow(e->a, -k)));
        if (auto l = lit_of(e->a)) {
          try {
            XC r = xc_pow(XC(*l), k);
            if (!r.is_inf()) return e_lit(r.value());
          } catch (const Error&) {}
        }
      }
      return e;
    }
    case Op::exp_: {
      if (auto l = lit_of(e->a)) {
        try {
          XC r = xc_exp(XC(*l));
          if (!r.is_inf()) return e_lit(r.value());
        } catch (const Error&) {}
      }
      return e;
    }
    case Op::compose: {
      if (e->b->op == Op::var) return e->a;
      if (e->a->op == Op::var) return e->b;
      if (e->a->op == Op::lit) return e->a;
      if (is_affine(e->a)) return canon(substitute_var(e->a, e->b));
      return e;
    }
    default:
      return e;
  }
}

}  // namespace

Expr canonical(const Expr& e) { return canon(e); }

Expr bind_symbols(const Expr& e, const Bindings& b) {
  std::function<Expr(const Expr&)> rec = [&](const Expr& f) -> Expr {
    switch (f->op) {
      case Op::var:
      case Op::lit:
        return f;
      case Op::index:
        if (!b.index) throw Error(Errc::unbound, "index symbol n is unbound");
        return e_lit(static_cast<double>(*b.index));
      case Op::param: {
        auto it = b.params.find(f->name);
        if (it == b.params.end())
          throw Error(Errc::unbound, "unbound parameter '" + f->name + "'");
        return e_lit(it->second);
      }
      case Op::neg:
        return e_neg(rec(f->a));
      case Op::exp_:
        return e_exp(rec(f->a));
      case Op::pow_: {
        PowExp pe = f->pe;
        if (pe.cn != 0) {
          if (!b.index) throw Error(Errc::unbound, "index symbol n is unbound");
          pe.c0 += pe.cn * *b.index;
          pe.cn = 0;
        }
        return e_pow(rec(f->a), pe);
      }
      default:
        return binary(f->op, rec(f->a), rec(f->b));
    }
  };
  return canonical(rec(e));
}

std::vector<std::string> param_names(const Expr& e) {
  std::vector<std::string> out;
  std::function<void(const Expr&)> rec = [&](const Expr& f) {
    if (f->op == Op::param) {
      for (const auto& s : out)
        if (s == f->name) return;
      out.push_back(f->name);
    }
    if (f->a) rec(f->a);
    if (f->b) rec(f->b);
  };
  rec(e);
  return out;
}

bool uses_index(const Expr& e) {
  if (e->op == Op::index) return true;
  if (e->op == Op::pow_ && e->pe.cn != 0) return true;
  if (e->a && uses_index(e->a)) return true;
  if (e->b && uses_index(e->b)) return true;
  return false;
}

// --- differentiation --------------------------------------------------------

namespace {

Expr diff(const Expr& e) {
  switch (e->op) {
    case Op::var:
      return e_lit(1.0);
    case Op::index:
    case Op::lit:
    case Op::param:
      return e_lit(0.0);
    case Op::add:
      return e_add(diff(e->a), diff(e->b));
    case Op::sub:
      return e_sub(diff(e->a), diff(e->b));
    case Op::mul:
      return e_add(e_mul(diff(e->a), e->b), e_mul(e->a, diff(e->b)));
    case Op::div_:
      return e_div(e_sub(e_mul(diff(e->a), e->b), e_mul(e->a, diff(e->b))),
                   e_pow(e->b, 2));
    case Op::neg:
      return e_neg(diff(e->a));
    case Op::pow_: {
      // d/dz f^(c0+cn*n) = (c0+cn*n) * f^(c0-1+cn*n) * f'
      Expr coef;
      if (e->pe.is_const())
        coef = e_lit(static_cast<double>(e->pe.c0));
      else if (e->pe.c0 == 0 && e->pe.cn == 1)
        coef = e_index();
      else
        coef = e_add(e_mul(e_lit(static_cast<double>(e->pe.cn)), e_index()),
                     e_lit(static_cast<double>(e->pe.c0)));
      PowExp down{e->pe.c0 - 1, e->pe.cn};
      return e_mul(e_mul(coef, e_pow(e->a, down)), diff(e->a));
    }
    case Op::exp_:
      return e_mul(e_exp(e->a), diff(e->a));
    case Op::compose:
      return e_mul(e_compose(diff(e->a), e->b), diff(e->b));
  }
  return e_lit(0.0);
}

}  // namespace

Expr differentiate(const Expr& e) { return canonical(diff(e)); }

// --- evaluation -------------------------------------------------------------

namespace {

XC eval_rec(const Expr& e, const XC& z) {
  switch (e->op) {
    case Op::var:
      return z;
    case Op::index:
      throw Error(Errc::unbound, "index symbol n is unbound");
    case Op::param:
      throw Error(Errc::unbound, "unbound parameter '" + e->name + "'");
    case Op::lit:
      return XC(e->lit);
    case Op::add:
      return xc_add(eval_rec(e->a, z), eval_rec(e->b, z));
    case Op::sub:
      return xc_sub(eval_rec(e->a, z), eval_rec(e->b, z));
    case Op::mul:
      return xc_mul(eval_rec(e->a, z), eval_rec(e->b, z));
    case Op::div_:
      return xc_div(eval_rec(e->a, z), eval_rec(e->b, z));
    case Op::neg:
      return xc_neg(eval_rec(e->a, z));
    case Op::pow_: {
      if (!e->pe.is_const())
        throw Error(Errc::unbound, "index symbol n is unbound");
      return xc_pow(eval_rec(e->a, z), e->pe.c0);
    }
    case Op::exp_:
      return xc_exp(eval_rec(e->a, z));
    case Op::compose:
      return eval_rec(e->a, eval_rec(e->b, z));
  }
  throw Error(Errc::precondition, "bad node");
}

}  // namespace

XC eval_at(const Expr& e, const XC& z) {
  try {
    return eval_rec(e, z);
  } catch (const Error& err) {
    if (err.code != Errc::indeterminate) throw;
    // rescue through the rational normal form: value at z by degree
    // comparison at infinity, a single L'Hopital step at a 0/0 point
    Rational r = rational_form(e);
    if (z.is_inf()) {
      long dn = r.num.degree(), dd = r.den.degree();
      if (r.num.is_zero()) return XC(0.0, 0.0);
      if (dn > dd) return XC::infinity();
      if (dn < dd) return XC(0.0, 0.0);
      return xc_div(XC(r.num.coeffs().back()), XC(r.den.coeffs().back()));
    }
    XC nv = r.num.eval_xc(z), dv = r.den.eval_xc(z);
    const double tiny = 1e-12;
    if (nv.is_inf() || dv.is_inf()) {
      if (nv.is_inf() && dv.is_inf())
        throw Error(Errc::indeterminate, "inf/inf after rational rescue");
      return nv.is_inf() ? XC::infinity() : XC(0.0, 0.0);
    }
    if (nv.abs() < tiny && dv.abs() < tiny) {
      XC n1 = r.num.derivative().eval_xc(z);
      XC d1 = r.den.derivative().eval_xc(z);
      if (!n1.is_inf() && !d1.is_inf() && n1.abs() < tiny && d1.abs() < tiny)
        throw Error(Errc::indeterminate,
                    "0/0 persists after one L'Hopital step");
      return xc_div(n1, d1);
    }
    return xc_div(nv, dv);
  }
}

Dual eval_dual(const Expr& e, const XC& z) {
  switch (e->op) {
    case Op::var:
      return {z, XC(1.0, 0.0)};
    case Op::index:
      throw Error(Errc::unbound, "index symbol n is unbound");
    case Op::param:
      throw Error(Errc::unbound, "unbound parameter '" + e->name + "'");
    case Op::lit:
      return {XC(e->lit), XC(0.0, 0.0)};
    case Op::add: {
      Dual a = eval_dual(e->a, z), b = eval_dual(e->b, z);
      return {xc_add(a.v, b.v), xc_add(a.d, b.d)};
    }
    case Op::sub: {
      Dual a = eval_dual(e->a, z), b = eval_dual(e->b, z);
      return {xc_sub(a.v, b.v), xc_sub(a.d, b.d)};
    }
    case Op::mul: {
      Dual a = eval_dual(e->a, z), b = eval_dual(e->b, z);
      return {xc_mul(a.v, b.v),
              xc_add(xc_mul(a.d, b.v), xc_mul(a.v, b.d))};
    }
    case Op::div_: {
      Dual a = eval_dual(e->a, z), b = eval_dual(e->b, z);
      XC v = xc_div(a.v, b.v);
      XC num = xc_sub(xc_mul(a.d, b.v), xc_mul(a.v, b.d));
      XC den = xc_mul(b.v, b.v);
      return {v, xc_div(num, den)};
    }
    case Op::neg: {
      Dual a = eval_dual(e->a, z);
      return {xc_neg(a.v), xc_neg(a.d)};
    }
    case Op::pow_: {
      if (!e->pe.is_const())
        throw Error(Errc::unbound, "index symbol n is unbound");
      long k = e->pe.c0;
      Dual a = eval_dual(e->a, z);
      XC v = xc_pow(a.v, k);
      XC d = xc_mul(xc_mul(XC(static_cast<double>(k), 0.0),
                           xc_pow(a.v, k - 1)),
                    a.d);
      return {v, d};
    }
    case Op::exp_: {
      Dual a = eval_dual(e->a, z);
      XC v = xc_exp(a.v);
      return {v, xc_mul(v, a.d)};
    }
    case Op::compose: {
      Dual g = eval_dual(e->b, z);
      Dual f = eval_dual(e->a, g.v);
      return {f.v, xc_mul(f.d, g.d)};
    }
  }
  throw Error(Errc::precondition, "bad node");
}

double spherical_derivative(const Expr& f, const Complex& z) {
  try {
    Dual d = eval_dual(f, XC(z));
    if (!d.v.is_inf() && !d.d.is_inf()) {
      double m = d.v.abs();
      return d.d.abs() / (1.0 + m * m);
    }
  } catch (const Error& err) {
    if (err.code == Errc::unbound || err.code == Errc::essential) throw;
    // fall through to the rational route
  }
  Rational r = rational_form(f);
  Complex nv, nd, dv, dd;
  r.num.eval_pair(z, nv, nd);
  r.den.eval_pair(z, dv, dd);
  double den2 = std::norm(nv) + std::norm(dv);
  if (!std::isfinite(den2) || den2 == 0.0)
    throw Error(Errc::indeterminate, "spherical derivative undefined here");
  double num = std::abs(nd * dv - nv * dd);
  if (!std::isfinite(num))
    throw Error(Errc::indeterminate, "spherical derivative overflow");
  return num / den2;
}

}  // namespace famdyn
