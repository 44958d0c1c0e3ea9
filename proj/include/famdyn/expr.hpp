#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "famdyn/sphere.hpp"

namespace famdyn {

enum class Op {
  var,      // the function variable z
  index,    // the family index symbol n
  lit,      // complex literal
  param,    // named parameter
  add, sub, mul, div_, neg,
  pow_,     // integer power; exponent affine in the index: c0 + cn*n
  exp_,     // unary exponential
  compose,  // a(b(z)); kept explicit, never expanded during enumeration
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Exponent of a power node: c0 + cn*n. With cn == 0 this is the plain
/// integer exponent; cn != 0 only appears in index-parametrised families
/// (z^n and its derivatives z^(n-1), ...).
struct PowExp {
  long c0 = 0;
  long cn = 0;
  bool is_const() const { return cn == 0; }
};

struct ExprNode {
  Op op;
  Complex lit{0.0, 0.0};
  std::string name;  // param
  PowExp pe;         // pow_
  Expr a, b;         // children; compose: a = outer, b = inner
};

// --- construction -----------------------------------------------------------
Expr e_var();
Expr e_index();
Expr e_lit(Complex c);
Expr e_lit(double re, double im = 0.0);
Expr e_param(const std::string& name);
Expr e_add(Expr a, Expr b);
Expr e_sub(Expr a, Expr b);
Expr e_mul(Expr a, Expr b);
Expr e_div(Expr a, Expr b);
Expr e_neg(Expr a);
Expr e_pow(Expr a, PowExp e);
Expr e_pow(Expr a, long k);
Expr e_exp(Expr a);
Expr e_compose(Expr outer, Expr inner);

// --- text -------------------------------------------------------------------

/**
 * Parses the expression grammar
 *   expr   := term (('+'|'-') term)*
 *   term   := factor (('*'|'/') factor)*
 *   factor := '-' factor | power
 *   power  := atom ['^' exponent]        (exponent: integer, n, or n+-k)
 *   atom   := 'z' | 'n' | 'i' | number | name | 'exp' '(' expr ')' | '(' expr ')'
 * with no implicit multiplication. The result is in canonical form.
 * Errors carry the byte offset of the offending token.
 */
Expr parse_expr(const std::string& text);

/// Precedence-aware rendering; parse_expr(print_expr(e)) == e for canonical e.
/// Composition nodes are rendered by textual substitution of the inner
/// expression (callers label deep members instead of printing them).
std::string print_expr(const Expr& e);

// --- structure --------------------------------------------------------------
bool expr_equal(const Expr& a, const Expr& b);
std::size_t expr_size(const Expr& e);

/// Constant folding, identity elimination, and inlining of compositions with
/// an affine outer part. Idempotent.
Expr canonical(const Expr& e);

/// Replaces parameters and (optionally) the index symbol by literals.
struct Bindings {
  std::map<std::string, Complex> params;
  std::optional<long> index;
};
Expr bind_symbols(const Expr& e, const Bindings& b);

/// Set of parameter names appearing in e.
std::vector<std::string> param_names(const Expr& e);
bool uses_index(const Expr& e);

// --- calculus ---------------------------------------------------------------

/// Symbolic derivative in z, returned in canonical form.
Expr differentiate(const Expr& e);

/// Plain evaluation on the extended plane; a 0/0 or inf/inf met along the way
/// is rescued once through the rational normal form (single L'Hopital step),
/// after which Errc::indeterminate is thrown. Unbound symbols throw.
XC eval_at(const Expr& e, const XC& z);

/// Forward-mode evaluation: value and dfdz in one pass. No rational rescue;
/// throws on indeterminate forms (callers fall back to rational evaluation).
struct Dual {
  XC v;
  XC d;
};
Dual eval_dual(const Expr& e, const XC& z);

/// |f'(z)| / (1 + |f(z)|^2), extended to poles through the reciprocal rule
/// (evaluates |N'D - ND'| / (|N|^2 + |D|^2) on the rational normal form,
/// which is symmetric in N,D and finite at poles).
double spherical_derivative(const Expr& f, const Complex& z);

}  // namespace famdyn
