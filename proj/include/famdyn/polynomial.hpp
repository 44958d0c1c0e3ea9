#pragma once

#include <cstdint>
#include <vector>

#include "famdyn/expr.hpp"

namespace famdyn {

/// Dense complex polynomial, coefficients ascending (c[k] multiplies z^k).
/// The zero polynomial has an empty coefficient vector.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs);
  static Polynomial constant(Complex c);
  static Polynomial variable();  // z

  const std::vector<Complex>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  long degree() const { return static_cast<long>(c_.size()) - 1; }  // -1 if 0

  Complex eval(const Complex& z) const;  // Horner
  XC eval_xc(const XC& z) const;         // overflow aware; defined at infinity
  void eval_pair(const Complex& z, Complex& p, Complex& dp) const;

  Polynomial derivative() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(Complex s) const;
  Polynomial pow(long k, long degree_cap) const;

  void trim();  // drop exact-zero leading coefficients

 private:
  std::vector<Complex> c_;
};

struct RootCluster {
  Complex z;
  int multiplicity;
};

/**
 * All complex roots by Ehrlich-Aberth simultaneous iteration.
 * Starts from a perturbed circle of radius 1 + max|coeff| (coefficients of
 * the monic normalisation); the perturbation stream is drawn from `seed`, so
 * results are reproducible. Residuals are driven below
 * 1e-10 * sum_k |a_k||z|^k; failure to converge throws Errc::no_converge.
 * Nearby iterates are merged into multiplicity clusters.
 */
std::vector<RootCluster> find_roots(const Polynomial& p, std::uint64_t seed);

/// f = num/den as given (no gcd reduction); degree = max of the two parts.
struct Rational {
  Polynomial num;
  Polynomial den;
  long degree() const {
    long dn = num.degree(), dd = den.degree();
    return dn > dd ? dn : dd;
  }
};

/// Rational normal form of a bound expression. Throws Errc::not_rational on
/// exp nodes and Errc::budget when an intermediate degree exceeds degree_cap.
Rational rational_form(const Expr& e, long degree_cap = 2048);

}  // namespace famdyn
