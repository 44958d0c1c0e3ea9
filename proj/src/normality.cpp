#include "famdyn/normality.hpp"

#include <algorithm>
#include <cmath>

#include "famdyn/parallel.hpp"
#include "famdyn/solve.hpp"
#include "famdyn/transitivity.hpp"

namespace famdyn {
namespace {

constexpr double kSupCap = 1e150;  // stand-in for an overflowed derivative

Complex require_finite(const XC& z0) {
  if (z0.is_inf())
    throw Error(Errc::precondition, "normality center must be finite");
  return z0.value();
}

// least-squares slope of log(sup) against log(ordinal)
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

std::vector<double> refine_radii(const std::vector<double>& radii) {
  if (radii.size() != 1) return radii;
  std::vector<double> out;
  double r = radii.front();
  for (int i = 0; i < 5; ++i, r /= 2) out.push_back(r);
  return out;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.empty())
    throw Error(Errc::precondition, "radii list must be nonempty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0))
      throw Error(Errc::precondition, "radii must be positive");
    if (i && !(radii[i] < radii[i - 1]))
      throw Error(Errc::precondition, "radii must be strictly decreasing");
  }
}

struct NormalClass {
  std::string verdict;
  std::vector<double> max_sups, slopes;
  std::vector<MartySup> last;  // sups at the smallest radius
  bool flagged = false;
};

NormalClass classify(const EnumeratedFamily& fam, const Complex& z0,
                     const std::vector<double>& radii, double threshold,
                     int grid_n) {
  NormalClass out;
  bool non_normal = true;
  long last_ok = 0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    MartyProfile p = marty_profile(fam, XC(z0), radii[ri], grid_n);
    out.max_sups.push_back(p.max_sup);
    out.slopes.push_back(p.slope);
    out.flagged = out.flagged || !p.notes.empty();
    non_normal = non_normal && p.max_sup > threshold && p.slope > kSlopeTol;
    if (ri + 1 == radii.size()) {
      out.last = std::move(p.sups);
      for (const MartySup& s : out.last) last_ok += s.ok ? 1 : 0;
    }
  }
  bool evidence = last_ok > 0 && out.max_sups.back() <= threshold &&
                  out.slopes.back() <= kSlopeTol;
  out.verdict =
      non_normal ? "non-normal" : evidence ? "normal-evidence" : "inconclusive";
  return out;
}

}  // namespace

MartyProfile marty_profile(const EnumeratedFamily& fam, const XC& z0,
                           double radius, int grid_n) {
  Complex c0 = require_finite(z0);
  if (!(radius > 0))
    throw Error(Errc::precondition, "profile radius must be > 0");
  if (grid_n < 3) throw Error(Errc::precondition, "subgrid must be >= 3x3");

  MartyProfile out;
  out.radius = radius;
  out.sups.resize(fam.size());
  std::vector<long> hits(fam.size(), 0), misses(fam.size(), 0);
  for (std::size_t i = 0; i < fam.size(); ++i)
    out.sups[i].label = fam.members[i].label;

  std::vector<DualResult> duals;
  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < grid_n; ++i) {
      Complex s = c0 + Complex(radius * (-1.0 + 2.0 * i / (grid_n - 1)),
                               radius * (-1.0 + 2.0 * j / (grid_n - 1)));
      if (std::abs(s - c0) > radius) continue;
      fam.eval_all_dual(XC(s), duals);
      for (std::size_t m = 0; m < fam.size(); ++m) {
        const DualResult& d = duals[m];
        MartySup& ms = out.sups[m];
        if (!d.ok) {
          ++misses[m];
          if (ms.err == Errc::none) ms.err = d.err;
          continue;
        }
        double mu;
        if (!d.v.is_inf() && !d.d.is_inf()) {
          double a = d.v.abs();
          mu = d.d.abs() / (1.0 + a * a);
        } else if (d.v.is_inf() && !d.d.is_inf()) {
          mu = 0.0;  // chordally flat at an overflowed value
        } else if (!d.v.is_inf()) {
          double a = d.v.abs();
          mu = kSupCap / (1.0 + a * a);
        } else {
          // value and derivative both beyond range: ask the pole-safe route
          ms.flagged = true;
          try {
            mu = spherical_derivative(fam.members[m].expr, s);
          } catch (const Error& e) {
            ++misses[m];
            if (ms.err == Errc::none) ms.err = e.code;
            continue;
          }
        }
        ++hits[m];
        ms.sup = std::max(ms.sup, mu);
      }
    }

  std::vector<double> xs, ys;
  long noted = 0;
  for (std::size_t m = 0; m < fam.size(); ++m) {
    MartySup& ms = out.sups[m];
    ms.ok = hits[m] > 0;
    ms.flagged = ms.flagged || misses[m] > 0;
    if (ms.ok) out.max_sup = std::max(out.max_sup, ms.sup);
    if (ms.ok && ms.sup > 0) {
      xs.push_back(std::log(static_cast<double>(m + 1)));
      ys.push_back(std::log(ms.sup));
    }
    if (ms.flagged) {
      if (noted < 8)
        out.notes.push_back("member '" + ms.label + "' lost " +
                            std::to_string(misses[m]) + " samples (" +
                            errc_name(ms.err) + ")");
      ++noted;
    }
  }
  if (noted > 8)
    out.notes.push_back(std::to_string(noted - 8) + " more members flagged");
  out.usable = static_cast<long>(xs.size());
  if (out.usable >= 2)
    out.slope = fit_slope(xs, ys);
  else if (out.max_sup > 0)
    out.notes.push_back("fewer than 2 positive sups; slope treated as 0");
  return out;
}

AnalysisReport is_normal_at(const EnumeratedFamily& fam, const XC& z0,
                            const std::vector<double>& radii, double threshold,
                            int grid_n, std::uint64_t seed) {
  Complex c0 = require_finite(z0);
  check_radii(radii);
  std::vector<double> rr = refine_radii(radii);

  AnalysisReport rep = make_report("is_normal_at", seed);
  rep.params["mode"] = "meromorphic-chordal";
  rep.params["z0"] = format_point(z0);
  rep.params["radii"] = rr;
  rep.params["threshold"] = threshold;
  rep.params["slope_tol"] = kSlopeTol;
  rep.params["subgrid"] = grid_n;
  rep.params["budget"] = fam.size();

  NormalClass cls = classify(fam, c0, rr, threshold, grid_n);
  rep.verdict = cls.verdict;
  rep.params["max_sups"] = cls.max_sups;
  rep.params["slopes"] = cls.slopes;
  if (cls.verdict == "non-normal") {
    long shown = 0, total = 0;
    for (const MartySup& s : cls.last)
      if (s.ok && s.sup > threshold) {
        ++total;
        if (shown < 16) {
          ojson w = ojson::object();
          w["label"] = s.label;
          w["sup"] = s.sup;
          rep.witnesses.push_back(w);
          ++shown;
        }
      }
    if (total > shown)
      rep.notes.push_back(std::to_string(total - shown) +
                          " further exceeding members suppressed");
  } else {
    ojson w = ojson::object();
    w["max_sup"] = cls.max_sups.back();
    w["slope"] = cls.slopes.back();
    rep.witnesses.push_back(w);
  }
  if (cls.flagged)
    rep.notes.push_back(
        "some member samples failed to evaluate; see marty_profile");
  return rep;
}

CellSetResult omitted_values(const EnumeratedFamily& fam, const Region& domain,
                             double domain_eps, const Region& codomain,
                             double codomain_eps, std::uint64_t seed) {
  CellSetResult out;
  out.grid = make_grid(codomain, codomain_eps);
  out.marks.assign(out.grid.cells.size(), 0);

  long eval_failures = 0;
  std::vector<EvalResult> vals;
  for (const Complex& s : make_net(domain, domain_eps)) {
    fam.eval_all(XC(s), vals);
    for (const EvalResult& v : vals) {
      if (!v.ok) {
        ++eval_failures;
        continue;
      }
      if (v.v.is_inf()) continue;
      auto k = out.grid.cell_index(v.v.value());
      if (k) out.marks[*k] = 1;
    }
  }

  // cells sampling never reached: solve f = center inside the domain before
  // calling them omitted
  bool have_nonrational = false;
  long skipped = 0;
  for (std::size_t k = 0; k < out.grid.cells.size(); ++k) {
    if (out.marks[k]) continue;
    const XC w(out.grid.cells[k].center);
    for (std::size_t i = 0; i < fam.size() && !out.marks[k]; ++i) {
      if (!fam.members[i].rational) {
        have_nonrational = true;
        continue;
      }
      try {
        if (domain.kind == Region::Kind::disk) {
          if (count_solutions_in(fam.members[i].expr, w, domain.center,
                                 domain.r1) > 0)
            out.marks[k] = 1;
        } else {
          for (const Preimage& q : preimages(fam.members[i].expr, w, seed))
            if (!q.z.is_inf() &&
                domain.contains(q.z.value(), 1e-9 * (1 + q.z.abs()))) {
              out.marks[k] = 1;
              break;
            }
        }
      } catch (const Error& e) {
        if (e.code == Errc::precondition) {
          out.marks[k] = 1;  // constant member sitting on the cell center
        } else {
          ++skipped;
        }
      }
    }
  }

  long hit = out.marked_count();
  out.proper = hit < static_cast<long>(out.grid.cells.size());
  out.notes.push_back(std::to_string(out.grid.cells.size() - hit) + " of " +
                      std::to_string(out.grid.cells.size()) +
                      " codomain cells omitted");
  if (eval_failures)
    out.notes.push_back(std::to_string(eval_failures) +
                        " member evaluations failed during sampling");
  if (have_nonrational)
    out.notes.push_back(
        "heuristic: non-rational members contribute sampled hits only");
  if (skipped)
    out.notes.push_back(std::to_string(skipped) +
                        " certification probes failed and were skipped");
  return out;
}

AnalysisReport montel_consistency(const EnumeratedFamily& fam,
                                  const Region& domain, double domain_eps,
                                  const Region& codomain, double codomain_eps,
                                  double threshold, double bound,
                                  std::uint64_t seed) {
  AnalysisReport rep = make_report("montel_consistency", seed);
  rep.params["mode"] = "meromorphic-chordal";
  rep.params["domain"] = domain.str();
  rep.params["domain_eps"] = domain_eps;
  rep.params["codomain"] = codomain.str();
  rep.params["codomain_eps"] = codomain_eps;
  rep.params["threshold"] = threshold;
  rep.params["bound"] = bound;
  rep.params["budget"] = fam.size();

  CellSetResult omitted = omitted_values(fam, domain, domain_eps, codomain,
                                         codomain_eps, seed);
  long robust = 0;
  for (std::size_t k = 0; k < omitted.grid.cells.size(); ++k) {
    if (omitted.marks[k]) continue;
    bool deep = true;
    for (std::size_t nb : omitted.grid.neighbors(k))
      deep = deep && !omitted.marks[nb];
    if (deep) ++robust;
  }
  rep.params["robustly_omitted"] = robust;

  // local boundedness: euclidean max modulus on the net, with the same
  // growth-slope guard as the Marty protocol so a finite budget cannot fake
  // a uniform bound
  std::vector<Complex> net = make_net(domain, domain_eps);
  std::vector<double> mod(fam.size(), 0.0);
  std::vector<std::uint8_t> unbounded(fam.size(), 0);
  std::vector<EvalResult> vals;
  for (const Complex& s : net) {
    fam.eval_all(XC(s), vals);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (!vals[i].ok || vals[i].v.is_inf())
        unbounded[i] = 1;
      else
        mod[i] = std::max(mod[i], vals[i].v.abs());
    }
  }
  bool bounded = true;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    bounded = bounded && !unbounded[i] && mod[i] <= bound;
    if (!unbounded[i] && mod[i] > 0) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(mod[i]));
    }
  }
  double mod_slope = xs.size() >= 2 ? fit_slope(xs, ys) : 0.0;
  bounded = bounded && mod_slope <= kSlopeTol;
  rep.params["bounded"] = bounded;
  rep.params["modulus_slope"] = mod_slope;

  if (robust < 3 && !bounded) {
    rep.verdict = "precondition-not-met";
    rep.notes.push_back(
        "fewer than 3 robustly omitted cells and no uniform bound detected; "
        "no normality claim follows");
    return rep;
  }
  rep.notes.push_back(robust >= 3 ? "hypothesis: >= 3 robustly omitted cells"
                                  : "hypothesis: uniform bound on the domain");

  std::vector<double> radii{domain_eps};
  std::vector<double> rr = refine_radii(radii);
  long violations = 0;
  for (const Complex& p : net) {
    NormalClass cls = classify(fam, p, rr, threshold, 41);
    if (cls.verdict == "non-normal") {
      ++violations;
      if (rep.witnesses.size() < 8) {
        ojson w = ojson::object();
        w["point"] = format_point(XC(p));
        w["max_sup"] = cls.max_sups.back();
        w["slope"] = cls.slopes.back();
        rep.witnesses.push_back(w);
      }
    }
  }
  rep.params["net_points"] = net.size();
  rep.verdict = violations ? "violated" : "consistent";
  if (violations)
    rep.notes.push_back(std::to_string(violations) +
                        " net points classified non-normal under a normality "
                        "hypothesis — implementation bug");
  return rep;
}

long FatouJulia::julia_count() const {
  long n = 0;
  for (std::uint8_t m : julia) n += m ? 1 : 0;
  return n;
}

Raster FatouJulia::raster() const {
  Raster r(grid.nx, grid.ny, grid.ox, grid.oy, grid.eps);
  r.field.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    std::size_t p = r.idx(grid.cells[k].i, grid.cells[k].j);
    r.marks[p] = julia[k];
    r.field[p] = marty[k];
  }
  return r;
}

std::string FatouJulia::sidecar_json(long budget, double threshold) const {
  ojson j;
  j["window"] = grid.region.str();
  j["pixels"] = ojson::array({grid.nx, grid.ny});
  j["threshold"] = threshold;
  j["budget"] = budget;
  j["marked_count"] = julia_count();
  return j.dump(2) + "\n";
}

FatouJulia fatou_julia(const EnumeratedFamily& fam, const Region& window,
                       int px, double threshold, std::uint64_t seed) {
  (void)seed;  // classification is deterministic; kept for interface parity
  if (window.kind != Region::Kind::rect)
    throw Error(Errc::precondition, "window must be a rectangle");
  if (px < 16) throw Error(Errc::precondition, "need at least 16x16 pixels");
  double step = (window.x1 - window.x0) / px;

  FatouJulia out;
  out.grid = make_grid(window, step);
  out.julia.assign(out.grid.cells.size(), 0);
  out.marty.assign(out.grid.cells.size(), 0.0);
  const std::vector<double> radii{2 * step, step};

  parallel_for(out.grid.cells.size(), [&](std::size_t k) {
    NormalClass cls =
        classify(fam, out.grid.cells[k].center, radii, threshold, 9);
    out.julia[k] = cls.verdict != "normal-evidence" ? 1 : 0;
    out.marty[k] = cls.max_sups.back();
  });
  out.notes.push_back(std::to_string(out.julia_count()) + " of " +
                      std::to_string(out.grid.cells.size()) +
                      " pixels marked");
  return out;
}

AnalysisReport weakly_mixing_equivalence_check(
    const EnumeratedFamily& fam, const XC& z0,
    const std::vector<double>& marty_radii, double threshold,
    const std::vector<double>& radii, const std::vector<Complex>& net1,
    const std::vector<Complex>& net2, double eps, std::uint64_t seed) {
  AnalysisReport rep = make_report("weakly_mixing_equivalence_check", seed);
  rep.params["mode"] = "meromorphic-chordal";
  rep.params["z0"] = format_point(z0);
  rep.params["budget"] = fam.size();

  AnalysisReport nr = is_normal_at(fam, z0, marty_radii, threshold, 41, seed);
  AnalysisReport mr =
      is_weakly_mixing_at(fam, z0, radii, net1, net2, eps, seed);
  rep.params["normal_verdict"] = nr.verdict;
  rep.params["mixing_verdict"] = mr.verdict;

  bool normal_cert = nr.verdict != "inconclusive";
  bool mixing_cert = mr.verdict == "holds-with-witness" ||
                     mr.verdict == "fails-at-resolution";
  if (!normal_cert || !mixing_cert) {
    rep.verdict = "exempt";
    rep.notes.push_back("at least one side is uncertified; no assertion");
    return rep;
  }
  bool non_normal = nr.verdict == "non-normal";
  bool mixing = mr.verdict == "holds-with-witness";
  rep.verdict = non_normal == mixing ? "agree" : "disagree";
  for (const auto& w : mr.witnesses) {
    rep.witnesses.push_back(w);
    if (rep.witnesses.size() >= 4) break;
  }
  if (rep.verdict == "disagree")
    rep.notes.push_back(
        "certified normality and mixing verdicts contradict the equivalence "
        "— implementation bug");
  return rep;
}

std::optional<Complex> find_normal_disk(const EnumeratedFamily& fam,
                                        const Region& domain,
                                        double domain_eps, double threshold) {
  std::vector<double> rr = refine_radii({domain_eps});
  for (const Complex& p : make_net(domain, domain_eps))
    if (classify(fam, p, rr, threshold, 41).verdict == "normal-evidence")
      return p;
  return std::nullopt;
}

}  // namespace famdyn
