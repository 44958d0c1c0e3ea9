#include "famdyn/solve.hpp"

#include <algorithm>
#include <cmath>

namespace famdyn {

namespace {

// one-shot cluster merge: sort by real part and sweep a tolerance window.
// Deep compositions accumulate thousands of preimages per level, so the
// per-insert linear scan below must not be used for them.
std::vector<Preimage> cluster_merge(std::vector<Preimage>&& raw) {
  std::vector<Preimage> fin;
  fin.reserve(raw.size());
  int inf_mult = 0;
  for (const Preimage& p : raw) {
    if (p.z.is_inf())
      inf_mult += p.multiplicity;
    else
      fin.push_back(p);
  }
  std::sort(fin.begin(), fin.end(), [](const Preimage& a, const Preimage& b) {
    const Complex x = a.z.value(), y = b.z.value();
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  std::vector<Preimage> out;  // representatives stay sorted by real part
  for (const Preimage& p : fin) {
    const Complex z = p.z.value();
    const double tol = 3e-4 * (1.0 + std::abs(z));
    bool merged = false;
    for (std::size_t j = out.size(); j-- > 0;) {
      const Complex q = out[j].z.value();
      if (q.real() < z.real() - tol) break;
      if (std::abs(q - z) <= tol) {
        out[j].multiplicity += p.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(p);
  }
  if (inf_mult) out.push_back({XC::infinity(), inf_mult});
  return out;
}

void merge_preimage(std::vector<Preimage>& acc, const XC& z, int mult) {
  for (auto& p : acc) {
    if (p.z.is_inf() && z.is_inf()) {
      p.multiplicity += mult;
      return;
    }
    if (!p.z.is_inf() && !z.is_inf() &&
        std::abs(p.z.value() - z.value()) <=
            3e-4 * (1.0 + std::abs(z.value()))) {
      p.multiplicity += mult;
      return;
    }
  }
  acc.push_back({z, mult});
}

std::vector<Preimage> preimages_rec(const Expr& f, const XC& w,
                                    std::uint64_t seed, long cap) {
  if (f->op == Op::compose) {
    std::vector<Preimage> mids = preimages_rec(f->a, w, seed, cap);
    std::vector<Preimage> raw;
    long total = 0;
    for (const auto& m : mids) {
      std::vector<Preimage> pre = preimages_rec(f->b, m.z, seed, cap);
      for (const auto& p : pre) {
        total += 1;
        if (total > cap)
          throw Error(Errc::budget, "preimage count cap exceeded");
        raw.push_back({p.z, p.multiplicity * m.multiplicity});
      }
    }
    return cluster_merge(std::move(raw));
  }

  Rational r = rational_form(f);
  long deg = r.degree();
  if (deg < 1) {
    // constant function: either every point or none; report none for a
    // mismatched constant, precondition error for an exact match
    XC cv = r.den.is_zero() ? XC::infinity()
                            : (r.num.is_zero()
                                   ? XC(0.0, 0.0)
                                   : xc_div(XC(r.num.coeffs().back()),
                                            XC(r.den.coeffs().back())));
    if (chordal(cv, w) < 1e-12)
      throw Error(Errc::precondition, "constant member equals target");
    return {};
  }
  if (deg > cap) throw Error(Errc::budget, "preimage degree cap exceeded");

  Polynomial target;
  if (w.is_inf()) {
    target = r.den;
  } else {
    target = r.num - r.den.scaled(w.value());
  }

  std::vector<Preimage> out;
  long finite_deg = std::max<long>(target.degree(), 0);
  if (target.degree() >= 1) {
    for (const auto& rc : find_roots(target, seed)) {
      // drop spurious roots of reducible representations when evaluation
      // succeeds and disagrees with the target
      bool keep = true;
      try {
        XC val = eval_at(f, XC(rc.z));
        keep = chordal(val, w) <= 1e-6;
      } catch (const Error&) {
        keep = true;
      }
      if (keep) merge_preimage(out, XC(rc.z), rc.multiplicity);
    }
  }
  if (finite_deg < deg) merge_preimage(out, XC::infinity(), static_cast<int>(deg - finite_deg));
  if (static_cast<long>(out.size()) > cap)
    throw Error(Errc::budget, "preimage count cap exceeded");
  return out;
}

}  // namespace

std::vector<Preimage> preimages(const Expr& f, const XC& w, std::uint64_t seed,
                                long cap) {
  std::vector<Preimage> out = preimages_rec(f, w, seed, cap);
  std::sort(out.begin(), out.end(), [](const Preimage& a, const Preimage& b) {
    if (a.z.is_inf() != b.z.is_inf()) return b.z.is_inf();
    if (a.z.is_inf()) return false;
    if (a.z.value().real() != b.z.value().real())
      return a.z.value().real() < b.z.value().real();
    return a.z.value().imag() < b.z.value().imag();
  });
  return out;
}

long count_solutions_in(const Expr& f, const XC& w, const Complex& center,
                        double radius, const WindingOptions& opt) {
  if (radius <= 0.0)
    throw Error(Errc::precondition, "winding disk radius must be positive");
  if (w.is_inf()) {
    // zeros of 1/f inside the disk = poles of f
    return count_solutions_in(canonical(e_div(e_lit(1.0), f)), XC(0.0, 0.0),
                              center, radius, opt);
  }
  const Complex wv = w.value();
  const double twopi = 2.0 * M_PI;

  for (int jitter = 0; jitter <= opt.max_jitter; ++jitter) {
    // alternate shrink/grow: 0, +1, -1, +2, -2, ... parts in 1.28e3
    int step = (jitter + 1) / 2;
    double sign = (jitter % 2 == 1) ? 1.0 : -1.0;
    double R = radius * (1.0 + sign * 7.8125e-4 * step);

    int M = opt.start_samples;
    bool clear = true;
    Complex prev(0, 0);
    bool have_prev = false;
    while (M <= opt.max_samples) {
      Complex acc(0, 0);
      clear = true;
      for (int j = 0; j < M && clear; ++j) {
        double t = twopi * (static_cast<double>(j) + 0.5) /
                   static_cast<double>(M);
        Complex dir(std::cos(t), std::sin(t));
        Complex zj = center + R * dir;
        try {
          Dual d = eval_dual(f, XC(zj));
          if (d.v.is_inf() || d.d.is_inf()) {
            clear = false;  // pole caught exactly on the contour
            break;
          }
          Complex denom = d.v.value() - wv;
          if (std::abs(denom) < 1e-9 * (1.0 + std::abs(wv))) {
            clear = false;  // solution on the boundary
            break;
          }
          acc += dir * d.d.value() / denom;
        } catch (const Error& err) {
          if (err.code == Errc::unbound) throw;
          clear = false;
          break;
        }
      }
      if (!clear) break;
      Complex I = acc * (R / static_cast<double>(M));
      double re = I.real(), im = I.imag();
      double nearest = std::round(re);
      bool integral = std::abs(im) <= opt.integer_slack &&
                      std::abs(re - nearest) <= opt.integer_slack;
      bool stable = have_prev && std::abs(I - prev) <= opt.stability_slack;
      if (integral && stable) return static_cast<long>(nearest);
      prev = I;
      have_prev = true;
      M *= 2;
    }
    if (clear)
      throw Error(Errc::no_converge,
                  "winding estimate failed to settle on an integer");
  }
  throw Error(Errc::boundary,
              "solutions of f(z)=w persist on the contour after jitter");
}

}  // namespace famdyn
