#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "famdyn/expr.hpp"
#include "famdyn/sphere.hpp"

using namespace famdyn;

TEST_CASE("parse/print fixpoint on canonical text") {
  for (const char* s : {"z", "z^2", "z^n", "z^n+1", "n*z", "exp(w*n)*z",
                        "z^2-1", "1/z", "z^-2", "(z+1)/(z-1)", "exp(z)",
                        "z^(n-1)", "-z"}) {
    Expr e = parse_expr(s);
    std::string printed = print_expr(e);
    Expr back = parse_expr(printed);
    CHECK(expr_equal(e, back));
    CHECK(print_expr(back) == printed);
  }
}

TEST_CASE("no implicit multiplication") {
  // note "zn" is absent: it lexes as one identifier (a parameter name)
  for (const char* bad : {"0.6i", "2z", "z z", "3(z+1)", "z n", "2 n"}) {
    try {
      parse_expr(bad);
      CHECK_MESSAGE(false, "expected parse failure for: " << std::string(bad));
    } catch (const Error& e) {
      CHECK(e.code == Errc::parse);
      CHECK(e.offset >= 0);
    }
  }
  // the imaginary unit is a factor, not a suffix
  Expr e = parse_expr("0.6*i");
  CHECK(eval_at(e, XC(0, 0)) == XC(0, 0.6));
}

TEST_CASE("canonical constant folding") {
  CHECK(print_expr(parse_expr("1+2")) == "3");
  CHECK(expr_equal(parse_expr("2*3*z"), parse_expr("6*z")));
  CHECK(expr_equal(canonical(parse_expr("z+0")), parse_expr("z")));
  CHECK(expr_equal(canonical(parse_expr("1*z")), parse_expr("z")));
  CHECK(expr_equal(canonical(canonical(parse_expr("2*(3*z)"))),
                   canonical(parse_expr("2*(3*z)"))));  // idempotent
}

TEST_CASE("symbolic derivative matches finite differences at second order") {
  Expr f = parse_expr("z^3-2*z+1");
  Expr df = differentiate(f);
  CHECK(expr_equal(df, parse_expr("3*z^2-2")));

  const Complex z0(0.7, 0.3);
  Complex exact = eval_at(df, XC(z0)).value();
  std::vector<double> errs;
  for (double h : {1e-3, 1e-4}) {
    Complex fp = eval_at(f, XC(z0 + Complex(h, 0))).value();
    Complex fm = eval_at(f, XC(z0 - Complex(h, 0))).value();
    Complex fd = (fp - fm) / (2 * h);
    errs.push_back(std::abs(fd - exact));
  }
  // central differences: error ~ h^2, so one decade in h is ~2 decades in err
  CHECK(errs[0] / errs[1] > 30.0);
  CHECK(errs[0] / errs[1] < 300.0);
}

TEST_CASE("derivative of indexed powers") {
  // d/dz z^n = n * z^(n-1), checked after binding n = 5
  Expr df = differentiate(parse_expr("z^n"));
  Bindings b;
  b.index = 5;
  Expr bound = bind_symbols(df, b);
  XC v = eval_at(bound, XC(2, 0));
  CHECK(v.value().real() == doctest::Approx(5 * 16.0));
  CHECK(v.value().imag() == doctest::Approx(0.0));
}

TEST_CASE("binding and unbound symbols") {
  Expr e = parse_expr("exp(w*n)*z");
  CHECK(uses_index(e));
  CHECK(param_names(e) == std::vector<std::string>{"w"});

  Bindings b;
  b.params["w"] = Complex(0, 1);
  b.index = 2;
  Expr bound = bind_symbols(e, b);
  XC v = eval_at(bound, XC(1, 0));
  CHECK(v.value().real() == doctest::Approx(std::cos(2.0)));
  CHECK(v.value().imag() == doctest::Approx(std::sin(2.0)));

  try {
    eval_at(e, XC(1, 0));  // w and n still symbolic
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.code == Errc::unbound);
  }
}

TEST_CASE("rational rescue at a removable singularity") {
  // (z^2-1)/(z-1) hits 0/0 at z=1; one L'Hopital step gives 2
  Expr e = parse_expr("(z^2-1)/(z-1)");
  XC v = eval_at(e, XC(1, 0));
  CHECK(chordal(v, XC(2, 0)) < 1e-9);
  // plain poles land at infinity
  CHECK(eval_at(parse_expr("1/z"), XC(0, 0)).is_inf());
}

TEST_CASE("dual evaluation agrees with value and derivative") {
  Expr f = parse_expr("(z^2+1)/(z-3)");
  Expr df = differentiate(f);
  for (Complex z : {Complex(0.5, 0.2), Complex(-1, 1), Complex(2, -2)}) {
    Dual d = eval_dual(f, XC(z));
    CHECK(chordal(d.v, eval_at(f, XC(z))) < 1e-10);
    CHECK(chordal(d.d, eval_at(df, XC(z))) < 1e-9);
  }
}

TEST_CASE("spherical derivative is pole-safe") {
  // f = z^2 at z=1: |2z|/(1+|z^2|^2) = 2/2 = 1
  CHECK(spherical_derivative(parse_expr("z^2"), Complex(1, 0)) ==
        doctest::Approx(1.0));
  // f = 1/z at the pole: |N'D-ND'|/(|N|^2+|D|^2) = 1/(1+0) = 1
  CHECK(spherical_derivative(parse_expr("1/z"), Complex(0, 0)) ==
        doctest::Approx(1.0));
  // constants are spherically flat everywhere
  CHECK(spherical_derivative(parse_expr("5"), Complex(2, 3)) ==
        doctest::Approx(0.0));
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    parse_expr("z + + 1");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Errc::parse);
    CHECK(e.offset >= 3);
  }
  CHECK_THROWS_AS(parse_expr("z^1.5"), Error);  // exponents are integers
  CHECK_THROWS_AS(parse_expr("(z"), Error);
  CHECK_THROWS_AS(parse_expr(""), Error);
}
