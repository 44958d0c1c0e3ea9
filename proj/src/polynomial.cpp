#include "famdyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <unordered_map>

namespace famdyn {

Polynomial::Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {
  trim();
}

Polynomial Polynomial::constant(Complex c) {
  if (c == Complex(0, 0)) return Polynomial();
  return Polynomial({c});
}

Polynomial Polynomial::variable() { return Polynomial({{0, 0}, {1, 0}}); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == Complex(0, 0)) c_.pop_back();
}

Complex Polynomial::eval(const Complex& z) const {
  Complex acc(0, 0);
  for (size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
  return acc;
}

XC Polynomial::eval_xc(const XC& z) const {
  if (is_zero()) return XC(0.0, 0.0);
  if (z.is_inf()) return degree() >= 1 ? XC::infinity() : XC(c_[0]);
  Complex v = eval(z.value());
  if (std::isfinite(v.real()) && std::isfinite(v.imag())) return XC(v);
  // Horner overflowed: evaluate the reversed polynomial at 1/z and scale back.
  Complex w = Complex(1, 0) / z.value();
  Complex acc(0, 0);
  for (size_t k = 0; k < c_.size(); ++k) acc = acc * w + c_[k];
  return xc_mul(xc_pow(z, degree()), XC(acc));
}

void Polynomial::eval_pair(const Complex& z, Complex& p, Complex& dp) const {
  p = Complex(0, 0);
  dp = Complex(0, 0);
  for (size_t k = c_.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c_[k];
  }
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<Complex> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k)
    d[k - 1] = c_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<Complex> r(std::max(c_.size(), o.c_.size()), Complex(0, 0));
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  std::vector<Complex> r(std::max(c_.size(), o.c_.size()), Complex(0, 0));
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] -= o.c_[k];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return Polynomial();
  std::vector<Complex> r(c_.size() + o.c_.size() - 1, Complex(0, 0));
  for (size_t j = 0; j < c_.size(); ++j)
    for (size_t k = 0; k < o.c_.size(); ++k) r[j + k] += c_[j] * o.c_[k];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::scaled(Complex s) const {
  std::vector<Complex> r = c_;
  for (auto& c : r) c *= s;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::pow(long k, long degree_cap) const {
  if (k < 0) throw Error(Errc::precondition, "negative polynomial power");
  Polynomial acc = Polynomial::constant(Complex(1, 0));
  Polynomial base = *this;
  while (k) {
    if ((base.degree() > 0 && base.degree() > degree_cap))
      throw Error(Errc::budget, "polynomial degree cap exceeded");
    if (k & 1) {
      acc = acc * base;
      if (acc.degree() > degree_cap)
        throw Error(Errc::budget, "polynomial degree cap exceeded");
    }
    k >>= 1;
    if (k) base = base * base;
  }
  return acc;
}

// --- roots ------------------------------------------------------------------

namespace {

double coeff_sum_at(const std::vector<Complex>& c, double az) {
  // sum_k |a_k| |z|^k, Horner in |z|
  double acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * az + std::abs(c[k]);
  return acc;
}

// Ehrlich-Aberth simultaneous iteration on a monic polynomial with
// coefficients c, seeded on a jittered circle of the given radius
void aberth_sweeps(const std::vector<Complex>& c, double radius,
                   std::uint64_t seed, std::vector<Complex>& zs) {
  const size_t n = zs.size();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jit(-0.5, 0.5);
  const double twopi = 2.0 * M_PI;
  for (size_t j = 0; j < n; ++j) {
    double ang = twopi * (static_cast<double>(j) + 0.25) /
                     static_cast<double>(n) +
                 jit(rng) * twopi / (4.0 * static_cast<double>(n));
    double rad = radius * (1.0 + 0.05 * jit(rng));
    zs[j] = Complex(rad * std::cos(ang), rad * std::sin(ang));
  }

  Polynomial mono{std::vector<Complex>(c)};
  const int max_sweeps = 240;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double worst_step = 0.0;
    for (size_t j = 0; j < n; ++j) {
      Complex pv, dv;
      mono.eval_pair(zs[j], pv, dv);
      double scale = coeff_sum_at(c, std::abs(zs[j]));
      if (std::abs(pv) <= 1e-14 * scale) continue;
      if (std::abs(dv) < 1e-290) {
        zs[j] += Complex(1e-6 * radius, 1e-6 * radius);
        worst_step = 1.0;
        continue;
      }
      Complex newton = pv / dv;
      Complex s(0, 0);
      for (size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        Complex diff = zs[j] - zs[k];
        if (std::abs(diff) < 1e-290) diff = Complex(1e-280, 0);
        s += Complex(1, 0) / diff;
      }
      Complex denom = Complex(1, 0) - newton * s;
      Complex step = (std::abs(denom) < 1e-290) ? newton : newton / denom;
      // trust region keeps early sweeps from exploding
      double cap = 0.5 * radius + 0.5;
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      zs[j] -= step;
      worst_step = std::max(worst_step, std::abs(step) /
                                            (1.0 + std::abs(zs[j])));
    }
    if (worst_step < 1e-15) converged = true;
  }
}

}  // namespace

std::vector<RootCluster> find_roots(const Polynomial& p, std::uint64_t seed) {
  std::vector<Complex> c = p.coeffs();
  if (c.size() <= 1)
    throw Error(Errc::precondition, "root finding on a constant polynomial");

  // exact zeros at the origin come off as a factor z^m
  size_t zeros_at_origin = 0;
  while (zeros_at_origin < c.size() - 1 && c[zeros_at_origin] == Complex(0, 0))
    ++zeros_at_origin;
  c.erase(c.begin(), c.begin() + static_cast<long>(zeros_at_origin));

  std::vector<RootCluster> out;
  size_t n = c.size() - 1;
  if (n > 0) {
    // monic normalisation
    Complex lead = c.back();
    for (auto& a : c) a /= lead;

    double radius = 1.0;
    for (size_t k = 0; k + 1 < c.size(); ++k)
      radius = std::max(radius, 1.0 + std::abs(c[k]));

    std::vector<Complex> zs(n);
    if (n == 1) {
      zs[0] = -c[0];
    } else if (n == 2) {
      // stable closed form (deep compositions solve millions of these)
      const Complex b = c[1], c0 = c[0];
      const Complex sq = std::sqrt(b * b - 4.0 * c0);
      const Complex q = std::real(std::conj(b) * sq) >= 0.0
                            ? -0.5 * (b + sq)
                            : -0.5 * (b - sq);
      if (std::abs(q) < 1e-290) {
        zs[0] = zs[1] = Complex(0, 0);
      } else {
        zs[0] = q;
        zs[1] = c0 / q;
      }
    } else {
      aberth_sweeps(c, radius, seed, zs);
    }

    Polynomial mono{std::vector<Complex>(c)};
    for (size_t j = 0; j < n; ++j) {
      double scale = coeff_sum_at(c, std::abs(zs[j]));
      if (std::abs(mono.eval(zs[j])) > 1e-10 * std::max(1.0, scale))
        throw Error(Errc::no_converge, "root refinement stalled");
    }

    // canonical order, then merge clusters of nearby iterates:
    // an m-fold root scatters its iterates across a radius ~eps^(1/m) ball
    std::sort(zs.begin(), zs.end(), [](const Complex& a, const Complex& b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    std::vector<int> cluster(n);
    std::vector<Complex> sum(n, Complex(0, 0));
    std::vector<int> count(n, 0);
    int nclusters = 0;
    for (size_t j = 0; j < n; ++j) {
      int found = -1;
      for (int q = 0; q < nclusters; ++q) {
        Complex centre = sum[q] / static_cast<double>(count[q]);
        double tol = 3e-4 * (1.0 + std::abs(centre));
        if (std::abs(zs[j] - centre) <= tol) {
          found = q;
          break;
        }
      }
      if (found < 0) found = nclusters++;
      cluster[j] = found;
      sum[found] += zs[j];
      count[found] += 1;
    }
    for (int q = 0; q < nclusters; ++q) {
      Complex root = sum[q] / static_cast<double>(count[q]);
      if (count[q] == 1) {
        // Newton polish for simple roots
        for (int it = 0; it < 3; ++it) {
          Complex pv, dv;
          mono.eval_pair(root, pv, dv);
          if (std::abs(dv) < 1e-290) break;
          root -= pv / dv;
        }
      }
      out.push_back({root, count[q]});
    }
  }
  if (zeros_at_origin > 0)
    out.push_back({Complex(0, 0), static_cast<int>(zeros_at_origin)});

  std::sort(out.begin(), out.end(), [](const RootCluster& a,
                                       const RootCluster& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return out;
}

// --- rational normal form ---------------------------------------------------

namespace {

Rational rational_rec(const Expr& e, long cap) {
  switch (e->op) {
    case Op::var:
      return {Polynomial::variable(), Polynomial::constant({1, 0})};
    case Op::lit:
      return {Polynomial::constant(e->lit), Polynomial::constant({1, 0})};
    case Op::index:
      throw Error(Errc::unbound, "index symbol n is unbound");
    case Op::param:
      throw Error(Errc::unbound, "unbound parameter '" + e->name + "'");
    case Op::exp_:
      throw Error(Errc::not_rational, "expression contains exp");
    case Op::neg: {
      Rational a = rational_rec(e->a, cap);
      return {a.num.scaled({-1, 0}), a.den};
    }
    case Op::add:
    case Op::sub: {
      Rational a = rational_rec(e->a, cap);
      Rational b = rational_rec(e->b, cap);
      Polynomial cross1 = a.num * b.den;
      Polynomial cross2 = b.num * a.den;
      Polynomial num =
          e->op == Op::add ? cross1 + cross2 : cross1 - cross2;
      Polynomial den = a.den * b.den;
      if (num.degree() > cap || den.degree() > cap)
        throw Error(Errc::budget, "rational degree cap exceeded");
      return {std::move(num), std::move(den)};
    }
    case Op::mul: {
      Rational a = rational_rec(e->a, cap);
      Rational b = rational_rec(e->b, cap);
      Polynomial num = a.num * b.num;
      Polynomial den = a.den * b.den;
      if (num.degree() > cap || den.degree() > cap)
        throw Error(Errc::budget, "rational degree cap exceeded");
      return {std::move(num), std::move(den)};
    }
    case Op::div_: {
      Rational a = rational_rec(e->a, cap);
      Rational b = rational_rec(e->b, cap);
      if (b.num.is_zero())
        throw Error(Errc::indeterminate, "division by the zero function");
      Polynomial num = a.num * b.den;
      Polynomial den = a.den * b.num;
      if (num.degree() > cap || den.degree() > cap)
        throw Error(Errc::budget, "rational degree cap exceeded");
      return {std::move(num), std::move(den)};
    }
    case Op::pow_: {
      if (!e->pe.is_const())
        throw Error(Errc::unbound, "index symbol n is unbound");
      long k = e->pe.c0;
      if (k < 0) {
        Rational a = rational_rec(e->a, cap);
        return {a.den.pow(-k, cap), a.num.pow(-k, cap)};
      }
      Rational a = rational_rec(e->a, cap);
      return {a.num.pow(k, cap), a.den.pow(k, cap)};
    }
    case Op::compose: {
      Rational f = rational_rec(e->a, cap);
      Rational g = rational_rec(e->b, cap);
      long dp = std::max<long>(f.num.degree(), 0);
      long dq = std::max<long>(f.den.degree(), 0);
      // P(g) = A / Dg^dp with A = sum p_k Ng^k Dg^(dp-k); same for Q
      auto subst = [&](const Polynomial& P, long dmax) {
        Polynomial acc;
        const auto& pc = P.coeffs();
        for (long k = dmax; k >= 0; --k) {
          acc = acc * g.num;
          Complex coef =
              (k < static_cast<long>(pc.size())) ? pc[k] : Complex(0, 0);
          if (coef != Complex(0, 0))
            acc = acc + g.den.pow(dmax - k, cap).scaled(coef);
          if (acc.degree() > cap)
            throw Error(Errc::budget, "rational degree cap exceeded");
        }
        return acc;
      };
      Polynomial A = subst(f.num, dp);
      Polynomial B = subst(f.den, dq);
      Polynomial num = A, den = B;
      if (dq > dp)
        num = A * g.den.pow(dq - dp, cap);
      else if (dp > dq)
        den = B * g.den.pow(dp - dq, cap);
      if (num.degree() > cap || den.degree() > cap)
        throw Error(Errc::budget, "rational degree cap exceeded");
      return {std::move(num), std::move(den)};
    }
  }
  throw Error(Errc::precondition, "bad node");
}

}  // namespace

Rational rational_form(const Expr& e, long degree_cap) {
  // The canonical form depends only on the node, and pointwise analyses ask
  // for the same handful of member expressions millions of times, so both
  // outcomes — the form and a deterministic failure — are memoized.
  struct Memo {
    std::weak_ptr<const ExprNode> guard;  // detects address reuse
    long cap = 0;
    bool ok = false;
    Rational value;
    Errc err = Errc::none;
    std::string msg;
  };
  static std::mutex mu;
  static std::unordered_map<const ExprNode*, Memo> cache;

  const ExprNode* key = e.get();
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end() && it->second.cap == degree_cap &&
        it->second.guard.lock().get() == key) {
      if (it->second.ok) return it->second.value;
      throw Error(it->second.err, it->second.msg);
    }
  }

  Memo m;
  m.guard = e;
  m.cap = degree_cap;
  try {
    m.value = rational_rec(e, degree_cap);
    if (m.value.den.is_zero())
      throw Error(Errc::indeterminate, "zero denominator function");
    m.ok = true;
  } catch (const Error& err) {
    m.err = err.code;
    m.msg = err.what();
  }

  std::lock_guard<std::mutex> lk(mu);
  if (cache.size() >= 512) cache.clear();
  Memo& slot = cache[key];
  slot = std::move(m);
  if (slot.ok) return slot.value;
  throw Error(slot.err, slot.msg);
}

}  // namespace famdyn
