#include "famdyn/sphere.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace famdyn {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::none: return "none";
    case Errc::parse: return "parse";
    case Errc::usage: return "usage";
    case Errc::unbound: return "unbound";
    case Errc::indeterminate: return "indeterminate";
    case Errc::essential: return "essential";
    case Errc::not_rational: return "not-rational";
    case Errc::budget: return "budget";
    case Errc::no_converge: return "no-converge";
    case Errc::boundary: return "boundary";
    case Errc::precondition: return "precondition";
    case Errc::io: return "io";
  }
  return "unknown";
}

ExtendedComplex::ExtendedComplex(const Complex& c) : inf_(false), v_(c) {
  if (std::isnan(c.real()) || std::isnan(c.imag()))
    throw Error(Errc::indeterminate, "NaN component in complex value");
  if (std::isinf(c.real()) || std::isinf(c.imag()) ||
      std::hypot(c.real(), c.imag()) > kOverflow) {
    inf_ = true;
    v_ = Complex(0.0, 0.0);
  }
}

const Complex& ExtendedComplex::value() const {
  if (inf_) throw Error(Errc::precondition, "finite value requested at infinity");
  return v_;
}

double ExtendedComplex::abs() const {
  if (inf_) return std::numeric_limits<double>::infinity();
  return std::hypot(v_.real(), v_.imag());
}

XC xc_add(const XC& a, const XC& b) {
  if (a.is_inf() && b.is_inf())
    throw Error(Errc::indeterminate, "inf + inf");
  if (a.is_inf() || b.is_inf()) return XC::infinity();
  return XC(a.value() + b.value());
}

XC xc_sub(const XC& a, const XC& b) {
  if (a.is_inf() && b.is_inf())
    throw Error(Errc::indeterminate, "inf - inf");
  if (a.is_inf() || b.is_inf()) return XC::infinity();
  return XC(a.value() - b.value());
}

XC xc_neg(const XC& a) {
  if (a.is_inf()) return a;
  return XC(-a.value());
}

XC xc_mul(const XC& a, const XC& b) {
  if (a.is_inf() || b.is_inf()) {
    const XC& fin = a.is_inf() ? b : a;
    if (!fin.is_inf() && fin.abs() == 0.0)
      throw Error(Errc::indeterminate, "0 * inf");
    return XC::infinity();
  }
  return XC(a.value() * b.value());
}

XC xc_div(const XC& a, const XC& b) {
  if (a.is_inf() && b.is_inf())
    throw Error(Errc::indeterminate, "inf / inf");
  if (a.is_inf()) return XC::infinity();
  if (b.is_inf()) return XC(0.0, 0.0);
  double bn = b.abs();
  if (bn == 0.0) {
    if (a.abs() == 0.0) throw Error(Errc::indeterminate, "0 / 0");
    return XC::infinity();
  }
  // Guard against double overflow in the quotient before it happens.
  if (a.abs() > bn * XC::kOverflow) return XC::infinity();
  return XC(a.value() / b.value());
}

XC xc_pow(const XC& a, long k) {
  if (k == 0) return XC(1.0, 0.0);  // convention: z^0 == 1 everywhere
  if (k < 0) return xc_div(XC(1.0, 0.0), xc_pow(a, -k));
  if (a.is_inf()) return XC::infinity();
  // square-and-multiply with overflow coercion at every step
  XC acc(1.0, 0.0);
  XC base = a;
  unsigned long e = static_cast<unsigned long>(k);
  while (e) {
    if (e & 1UL) {
      acc = xc_mul(acc, base);
      if (acc.is_inf()) return acc;
    }
    e >>= 1UL;
    if (e) {
      if (base.is_inf()) return XC::infinity();
      base = xc_mul(base, base);
    }
  }
  return acc;
}

XC xc_exp(const XC& a) {
  if (a.is_inf())
    throw Error(Errc::essential, "exp at infinity (essential singularity)");
  const Complex& z = a.value();
  // |exp(z)| = e^re; past the overflow cut the value is coerced to infinity.
  if (z.real() > 345.0) return XC::infinity();
  return XC(std::exp(z));
}

double chordal(const XC& a, const XC& b) {
  if (a.is_inf() && b.is_inf()) return 0.0;
  if (a.is_inf() || b.is_inf()) {
    const XC& fin = a.is_inf() ? b : a;
    double m = fin.abs();
    if (m > 1e150) return 0.0;
    return 2.0 / std::sqrt(1.0 + m * m);
  }
  // single division keeps the metric exactly symmetric in a, b
  double num = 2.0 * std::abs(a.value() - b.value());
  double da = std::sqrt(1.0 + a.abs() * a.abs());
  double db = std::sqrt(1.0 + b.abs() * b.abs());
  return num / (da * db);
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string format_point(const XC& p) {
  if (p.is_inf()) return "inf";
  double re = p.value().real(), im = p.value().imag();
  std::string s = format_double(re);
  if (im >= 0.0 || std::isnan(im))
    s += "+" + format_double(im);
  else
    s += "-" + format_double(-im);
  s += "i";
  return s;
}

namespace {

// parses a double at s[pos...], advancing pos; returns false if none
bool scan_double(const std::string& s, size_t& pos, double& out) {
  const char* begin = s.c_str() + pos;
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) return false;
  pos += static_cast<size_t>(end - begin);
  out = v;
  return true;
}

}  // namespace

XC parse_point(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t == "inf" || t == "+inf" || t == "Inf") return XC::infinity();
  size_t pos = 0;
  double re = 0.0;
  if (!scan_double(t, pos, re))
    throw Error(Errc::parse, "bad point literal: '" + text + "'", 0);
  if (pos == t.size()) return XC(re, 0.0);
  if (t[pos] == 'i' && pos + 1 == t.size()) return XC(0.0, re);  // pure "Xi"
  double im = 0.0;
  size_t impos = pos;
  if (!scan_double(t, impos, im))
    throw Error(Errc::parse, "bad point literal: '" + text + "'",
                static_cast<long>(pos));
  if (impos >= t.size() || t[impos] != 'i' || impos + 1 != t.size())
    throw Error(Errc::parse, "bad point literal: '" + text + "'",
                static_cast<long>(impos));
  return XC(re, im);
}

}  // namespace famdyn
