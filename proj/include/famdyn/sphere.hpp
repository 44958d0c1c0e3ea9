#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace famdyn {

using Complex = std::complex<double>;

enum class Errc {
  none,
  parse,        // malformed expression / point / region text
  usage,        // bad CLI arguments or config
  unbound,      // unbound parameter or index symbol
  indeterminate,// 0/0, inf-inf, 0*inf after all rescue steps
  essential,    // exp evaluated at infinity
  not_rational, // rational normal form requested for a non-rational expression
  budget,       // degree / preimage-count / enumeration cap exceeded
  no_converge,  // iterative routine failed to reach its tolerance
  boundary,     // contour passes through a solution even after jitter
  precondition, // operation precondition violated
  io,           // file read/write failure
};

/// Single exception type for the whole library; `where` is a byte offset for
/// parse errors (-1 otherwise).
class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& msg, long where = -1)
      : std::runtime_error(msg), code(c), offset(where) {}
  Errc code;
  long offset;
};

const char* errc_name(Errc c);

/// A point of the extended complex plane: either a finite value with no NaN
/// components, or the single point at infinity. Finite magnitudes above
/// kOverflow are coerced to infinity on construction, so every stored finite
/// value is safely squarable in double precision.
class ExtendedComplex {
 public:
  static constexpr double kOverflow = 1e150;

  ExtendedComplex() : inf_(false), v_(0.0, 0.0) {}
  ExtendedComplex(double re, double im) : ExtendedComplex(Complex(re, im)) {}
  ExtendedComplex(const Complex& c);  // NOLINT: implicit by design
  static ExtendedComplex infinity() {
    ExtendedComplex e;
    e.inf_ = true;
    return e;
  }

  bool is_inf() const { return inf_; }
  const Complex& value() const;  // throws on infinity
  double abs() const;            // +inf for the infinite point

  bool operator==(const ExtendedComplex& o) const {
    return inf_ == o.inf_ && (inf_ || v_ == o.v_);
  }

 private:
  bool inf_;
  Complex v_;
};

using XC = ExtendedComplex;

// Arithmetic on the sphere. Indeterminate forms (inf-inf, 0*inf, 0/0,
// inf/inf) throw Error(Errc::indeterminate); callers with more context
// (rational normal forms) catch and rescue.
XC xc_add(const XC& a, const XC& b);
XC xc_sub(const XC& a, const XC& b);
XC xc_neg(const XC& a);
XC xc_mul(const XC& a, const XC& b);
XC xc_div(const XC& a, const XC& b);
XC xc_pow(const XC& a, long k);  // k may be negative
XC xc_exp(const XC& a);          // throws Errc::essential at infinity

/**
 * Chordal distance on the Riemann sphere,
 *   chi(a,b) = 2|a-b| / (sqrt(1+|a|^2) * sqrt(1+|b|^2)),
 *   chi(a,inf) = 2 / sqrt(1+|a|^2),
 * with range [0,2]; antipodal pairs (a, -1/conj(a)) sit at exactly 2.
 */
double chordal(const XC& a, const XC& b);

/// Renders "re+imi" / "re-imi" ("inf" for the infinite point) with
/// round-trip-exact float formatting; parse_point inverts it.
std::string format_point(const XC& p);
XC parse_point(const std::string& text);

/// Shortest decimal rendering of a double that parses back to the same bits.
std::string format_double(double x);

}  // namespace famdyn
