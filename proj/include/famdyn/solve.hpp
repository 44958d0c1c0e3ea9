#pragma once

#include <cstdint>
#include <vector>

#include "famdyn/polynomial.hpp"

namespace famdyn {

struct Preimage {
  XC z;
  int multiplicity;
};

/**
 * All solutions of f(z) = w on the extended plane, with multiplicities
 * summing to the degree of f's stored rational representation. Composition
 * nodes are resolved recursively (pre(f o g, w) = pre(g, pre(f, w))) so the
 * composed degree never has to be expanded. Roots are validated by
 * back-substitution; the total solution count is capped by `cap`
 * (Errc::budget beyond it). Rational members only (Errc::not_rational).
 */
std::vector<Preimage> preimages(const Expr& f, const XC& w,
                                std::uint64_t seed, long cap = 4096);

struct WindingOptions {
  int start_samples = 64;
  int max_samples = 1 << 17;
  int max_jitter = 8;
  double integer_slack = 0.25;   // accept when within this of an integer
  double stability_slack = 0.1;  // and one refinement step moved less than this
};

/**
 * Winding number of f(boundary of D(center, radius)) - w around 0, i.e.
 * (zeros - poles) of f - w inside the disk, by trapezoidal integration of
 * f'/(f-w) with sample doubling until the estimate is stably within 0.25 of
 * an integer. If solutions sit (numerically) on the boundary the radius is
 * jittered by parts in ~1e-3 up to 8 times; Errc::boundary / no_converge
 * beyond that. For pole-free members this is the exact solution count.
 */
long count_solutions_in(const Expr& f, const XC& w, const Complex& center,
                        double radius, const WindingOptions& opt = {});

}  // namespace famdyn
