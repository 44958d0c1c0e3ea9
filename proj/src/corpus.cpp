#include "famdyn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "famdyn/family.hpp"
#include "famdyn/normality.hpp"
#include "famdyn/orbits.hpp"
#include "famdyn/region.hpp"
#include "famdyn/report.hpp"
#include "famdyn/sphere.hpp"
#include "famdyn/transitivity.hpp"
#include "json.hpp"

namespace famdyn {

namespace {

namespace fs = std::filesystem;

ojson load_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(Errc::io, "cannot open " + p.string());
  return ojson::parse(in);
}

std::vector<double> radii_of(const ojson& a) {
  std::vector<double> r;
  for (const auto& v : a) r.push_back(v.get<double>());
  return r;
}

std::vector<Complex> points_of(const ojson& a) {
  std::vector<Complex> p;
  for (const auto& v : a)
    p.push_back(parse_point(v.get<std::string>()).value());
  return p;
}

std::vector<XC> xc_points_of(const ojson& a) {
  std::vector<XC> p;
  for (const auto& v : a) p.push_back(parse_point(v.get<std::string>()));
  return p;
}

// "holds-with-witness" and "holds (heuristic)" agree as a class; everything
// else only agrees with itself.
std::string verdict_class(const std::string& v) {
  if (v.rfind("holds", 0) == 0) return "holds";
  return v;
}

struct Ctx {
  fs::path out;
  std::uint64_t seed = 0;
  CorpusOutcome* res = nullptr;
  std::string fam;

  void line(const std::string& check, bool ok, const std::string& detail) {
    res->lines.push_back({fam + "." + check, ok, detail});
    if (!ok) res->exit_code = 2;
  }
  std::string path(const std::string& leaf) const {
    return (out / (fam + "_" + leaf)).string();
  }
};

long closure_count(const Grid& g, const std::vector<std::uint8_t>& marks) {
  return static_cast<long>(grid_closure_violations(g, marks).size());
}

// Finite omega points dropped into a coarse grid over their inflated bbox;
// an unmarked cell fully ringed by marked cells would break closedness.
// Fewer than two finite points cannot ring anything.
long pointset_closure_count(const PointSet& ps) {
  std::vector<Complex> finite;
  for (const auto& e : ps.entries())
    if (!e.z.is_inf()) finite.push_back(e.z.value());
  if (finite.size() < 2) return 0;
  Region r;
  r.kind = Region::Kind::rect;
  r.x0 = r.x1 = finite[0].real();
  r.y0 = r.y1 = finite[0].imag();
  for (const Complex& z : finite) {
    r.x0 = std::min(r.x0, z.real());
    r.x1 = std::max(r.x1, z.real());
    r.y0 = std::min(r.y0, z.imag());
    r.y1 = std::max(r.y1, z.imag());
  }
  r.x0 -= 0.5;
  r.y0 -= 0.5;
  r.x1 += 0.5;
  r.y1 += 0.5;
  Grid g = make_grid(r, 0.25);
  std::vector<std::uint8_t> marks(g.cells.size(), 0);
  for (const Complex& z : finite)
    if (auto k = g.cell_index(z)) marks[*k] = 1;
  return closure_count(g, marks);
}

void run_ttm(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  Region domain = Region::parse(cfg.at("domain").get<std::string>());
  double deps = cfg.at("domain_eps").get<double>();
  Region target = Region::parse(cfg.at("target").get<std::string>());
  double teps = cfg.at("target_eps").get<double>();
  double eps = cfg.at("eps").get<double>();
  std::vector<Complex> net = make_net(target, teps);

  AnalysisReport mn = is_minimal(fam, domain, deps, net, eps, c.seed);
  mn.write(c.path("minimal.json"));
  AnalysisReport tr =
      is_transitive(fam, domain, {deps}, net, eps, std::nullopt, c.seed);
  tr.write(c.path("transitive.json"));

  CellSetResult uni = universal_points(fam, domain, deps, net, eps);
  uni.raster().write_pgm(c.path("universal.pgm"), uni.sidecar_json());
  long viol = closure_count(uni.grid, uni.marks);

  const std::string wm = cfg.at("expect_minimal").get<std::string>();
  const std::string wt = cfg.at("expect_transitive").get<std::string>();
  bool ok = mn.verdict == wm && tr.verdict == wt &&
            verdict_class(mn.verdict) == verdict_class(tr.verdict) &&
            viol == 0;
  std::ostringstream d;
  d << "minimal=" << mn.verdict << " transitive=" << tr.verdict
    << " closure=" << viol;
  if (!ok) d << " (wanted " << wm << " / " << wt << ")";
  c.line("ttm", ok, d.str());
}

void run_densepre(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  Region domain = Region::parse(cfg.at("domain").get<std::string>());
  double deps = cfg.at("domain_eps").get<double>();
  Region netreg = Region::parse(cfg.at("net").get<std::string>());
  double neps = cfg.at("net_eps").get<double>();
  double eps = cfg.at("eps").get<double>();
  std::vector<Complex> net = make_net(netreg, neps);

  AnalysisReport dp = dense_preimage_test(fam, net, eps, domain, deps, c.seed);
  dp.write(c.path("densepre.json"));
  AnalysisReport tr =
      is_transitive(fam, domain, {deps}, net, eps, std::nullopt, c.seed);
  tr.write(c.path("densepre_transitive.json"));

  const std::string wd = cfg.at("expect").get<std::string>();
  const std::string wt = cfg.at("expect_transitive").get<std::string>();
  bool ok = dp.verdict == wd && tr.verdict == wt &&
            verdict_class(dp.verdict) == verdict_class(tr.verdict);
  std::ostringstream d;
  d << "densepre=" << dp.verdict << " transitive=" << tr.verdict;
  if (!ok) d << " (wanted " << wd << " / " << wt << ")";
  c.line("densepre", ok, d.str());
}

void run_meyrath(Ctx& c, const FamilySpec& spec, const ojson& cfg, int k) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  XC z0 = parse_point(cfg.at("z0").get<std::string>());
  std::vector<double> marty_radii = radii_of(cfg.at("marty_radii"));
  double threshold = cfg.at("threshold").get<double>();
  std::vector<double> radii = radii_of(cfg.at("radii"));
  std::vector<Complex> net1 = points_of(cfg.at("net1"));
  std::vector<Complex> net2 = points_of(cfg.at("net2"));
  double eps = cfg.at("eps").get<double>();

  AnalysisReport eq = weakly_mixing_equivalence_check(
      fam, z0, marty_radii, threshold, radii, net1, net2, eps, c.seed);
  eq.write(c.path("meyrath" + std::to_string(k) + ".json"));
  if (eq.verdict == "agree") ++c.res->meyrath_certified;

  std::string nv = eq.params.value("normal_verdict", "");
  std::string mv = eq.params.value("mixing_verdict", "");
  const std::string wn = cfg.at("expect_normal").get<std::string>();
  const std::string wm = cfg.at("expect_mixing").get<std::string>();
  const std::string we = cfg.at("expect").get<std::string>();
  bool ok = eq.verdict == we && nv == wn && mv == wm;
  std::ostringstream d;
  d << "normal=" << nv << " mixing=" << mv << " -> " << eq.verdict;
  if (!ok) d << " (wanted " << wn << " / " << wm << " -> " << we << ")";
  c.line("meyrath" + std::to_string(k), ok, d.str());
}

void run_marty_slope(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  XC z0 = parse_point(cfg.at("z0").get<std::string>());
  double radius = cfg.at("radius").get<double>();
  MartyProfile mp = marty_profile(fam, z0, radius);

  ojson j = ojson::object();
  j["radius"] = radius;
  j["slope"] = mp.slope;
  j["max_sup"] = mp.max_sup;
  j["usable"] = mp.usable;
  std::ofstream out(c.path("marty.json"));
  out << j.dump(2) << "\n";

  double lo = cfg.at("lo").get<double>(), hi = cfg.at("hi").get<double>();
  bool ok = mp.slope >= lo && mp.slope <= hi;
  std::ostringstream d;
  d << "slope=" << format_double(mp.slope);
  if (!ok) d << " (wanted [" << format_double(lo) << ", " << format_double(hi)
             << "])";
  c.line("marty-slope", ok, d.str());
}

void run_montel(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  Region domain = Region::parse(cfg.at("domain").get<std::string>());
  double deps = cfg.at("domain_eps").get<double>();
  Region codomain = Region::parse(cfg.at("codomain").get<std::string>());
  double ceps = cfg.at("codomain_eps").get<double>();
  double threshold = cfg.at("threshold").get<double>();
  double bound = cfg.at("bound").get<double>();

  AnalysisReport rep = montel_consistency(fam, domain, deps, codomain, ceps,
                                          threshold, bound, c.seed);
  rep.write(c.path("montel.json"));
  const std::string want = cfg.at("expect").get<std::string>();
  bool ok = rep.verdict == want;
  c.line("montel", ok,
         ok ? rep.verdict : rep.verdict + " (wanted " + want + ")");
}

void run_omega(Ctx& c, const FamilySpec& spec, const ojson& cfg, int k) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  XC z0 = parse_point(cfg.at("z0").get<std::string>());
  double ceps = cfg.at("cluster_eps").get<double>();
  PointSet om = omega_limit(fam, z0, ceps);
  om.write_csv(c.path("omega" + std::to_string(k) + ".csv"));
  long viol = pointset_closure_count(om);

  std::ostringstream d;
  bool ok = false;
  if (cfg.contains("dense_circle")) {
    // every omega point should be (numerically) on the unit circle; the gap
    // bound is on consecutive angular spacing around it
    double maxgap = 0;
    std::vector<double> args;
    bool circ = !om.entries().empty();
    for (const auto& e : om.entries()) {
      if (e.z.is_inf() || std::abs(std::abs(e.z.value()) - 1.0) > 0.1) {
        circ = false;
        break;
      }
      args.push_back(std::arg(e.z.value()));
    }
    if (circ) {
      std::sort(args.begin(), args.end());
      for (std::size_t i = 1; i < args.size(); ++i)
        maxgap = std::max(maxgap, args[i] - args[i - 1]);
      maxgap = std::max(
          maxgap, args.front() + 2 * 3.14159265358979323846 - args.back());
    }
    double gap_bound = cfg.at("dense_circle").get<double>();
    ok = circ && maxgap <= gap_bound && viol == 0;
    d << "points=" << om.size() << " maxgap=" << format_double(maxgap)
      << " closure=" << viol;
    if (!ok) d << " (wanted gap <= " << format_double(gap_bound) << ")";
  } else {
    std::vector<XC> want = xc_points_of(cfg.at("expect"));
    double tol = cfg.at("tol").get<double>();
    ok = om.size() == want.size();
    for (const XC& w : want) {
      bool hit = false;
      for (const auto& e : om.entries()) hit = hit || chordal(e.z, w) <= tol;
      ok = ok && hit;
    }
    ok = ok && viol == 0;
    d << "got {";
    for (std::size_t i = 0; i < om.entries().size(); ++i)
      d << (i ? ", " : "") << format_point(om.entries()[i].z);
    d << "} closure=" << viol;
  }
  c.line("omega" + std::to_string(k), ok, d.str());
}

void run_invariant(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  PointSet S;
  for (const XC& z : xc_points_of(cfg.at("points")))
    S.add(z, format_point(z));
  double tol = cfg.at("tol").get<double>();
  InvarianceResult inv = is_forward_invariant(fam, S, tol);

  AnalysisReport rep = make_report("forward-invariance", c.seed);
  rep.verdict = inv.invariant ? "invariant" : "not-invariant";
  for (const auto& w : inv.witnesses) {
    ojson o = ojson::object();
    o["label"] = w.label;
    o["z"] = format_point(w.z);
    o["image"] = format_point(w.image);
    rep.witnesses.push_back(o);
  }
  rep.notes = inv.notes;
  rep.write(c.path("invariant.json"));

  bool ok = inv.invariant == cfg.at("expect_invariant").get<bool>();
  std::ostringstream d;
  d << rep.verdict;
  if (!inv.invariant) {
    ok = ok && !inv.witnesses.empty();
    if (ok) {
      const auto& w = inv.witnesses.front();
      XC want_img = parse_point(cfg.at("witness_image").get<std::string>());
      ok = w.label == cfg.at("witness_label").get<std::string>() &&
           chordal(w.image, want_img) <= 1e-9;
      d << " witness " << w.label << ": " << format_point(w.z) << " -> "
        << format_point(w.image);
    }
  }
  c.line("invariant", ok, d.str());
}

void run_expanding(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  XC z0 = parse_point(cfg.at("z0").get<std::string>());
  Region kreg = Region::parse(cfg.at("K").get<std::string>());
  double keps = cfg.at("k_eps").get<double>();
  std::vector<Complex> K = make_net(kreg, keps);
  std::vector<XC> E = xc_points_of(cfg.at("exceptional"));
  std::vector<double> radii = radii_of(cfg.at("radii"));
  long q = cfg.at("q").get<long>();
  Region netreg = Region::parse(cfg.at("net").get<std::string>());
  std::vector<Complex> net =
      make_net(netreg, cfg.at("net_eps").get<double>());
  double eps = cfg.at("eps").get<double>();

  AnalysisReport rep = expanding_implies_transitive_check(
      fam, z0, K, keps, E, radii, q, net, eps, c.seed);
  rep.write(c.path("expanding.json"));
  const std::string want = cfg.at("expect").get<std::string>();
  bool ok = rep.verdict == want;
  c.line("expanding", ok,
         ok ? rep.verdict : rep.verdict + " (wanted " + want + ")");
}

void run_nonwandering(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  EnumeratedFamily fam = enumerate_family(spec, cfg.at("budget").get<long>());
  Region region = Region::parse(cfg.at("region").get<std::string>());
  double eps = cfg.at("eps").get<double>();
  CellSetResult nw = nonwandering_set(fam, region, eps, false, c.seed);
  nw.raster().write_pgm(c.path("nonwandering.pgm"), nw.sidecar_json());
  long viol = closure_count(nw.grid, nw.marks);
  bool ok = viol == 0;
  std::ostringstream d;
  d << "marked=" << nw.marked_count() << "/" << nw.grid.cells.size()
    << " closure=" << viol;
  c.line("nonwandering", ok, d.str());
}

void run_julia(Ctx& c, const FamilySpec& spec, const ojson& cfg) {
  long budget = cfg.at("budget").get<long>();
  EnumeratedFamily fam = enumerate_family(spec, budget);
  Region window = Region::parse(cfg.at("window").get<std::string>());
  int px = cfg.at("px").get<int>();
  double threshold = cfg.at("threshold").get<double>();
  FatouJulia fj = fatou_julia(fam, window, px, threshold, c.seed);
  fj.raster().write_pgm(c.path("julia.pgm"),
                        fj.sidecar_json(budget, threshold));
  long viol = closure_count(fj.grid, fj.julia);
  long count = fj.julia_count();
  long lo = cfg.at("min_count").get<long>();
  long hi = cfg.at("max_count").get<long>();
  bool ok = count >= lo && count <= hi && viol == 0;
  std::ostringstream d;
  d << "julia=" << count << "px closure=" << viol;
  if (!ok) d << " (wanted [" << lo << ", " << hi << "])";
  c.line("julia", ok, d.str());
}

}  // namespace

std::string CorpusOutcome::summary() const {
  std::ostringstream o;
  for (const CorpusLine& l : lines)
    o << (l.ok ? "ok   " : "FAIL ") << l.name << "  " << l.detail << "\n";
  o << (exit_code == 0 ? "corpus: all checks passed"
                       : "corpus: expectation failures")
    << "\n";
  return o.str();
}

CorpusOutcome run_corpus(const std::string& corpus_dir,
                         const std::string& out_dir, std::uint64_t seed) {
  CorpusOutcome res;
  fs::create_directories(out_dir);
  ojson exp = load_json(fs::path(corpus_dir) / "expectations.json");

  for (const ojson& fe : exp.at("families")) {
    FamilySpec spec = load_family_file(
        (fs::path(corpus_dir) / fe.at("file").get<std::string>()).string());
    Ctx c{fs::path(out_dir), seed, &res, spec.name};
    // a crashed check is a failed check, never a skipped one
    auto guarded = [&](const std::string& name, auto&& body) {
      try {
        body();
      } catch (const std::exception& e) {
        c.line(name, false, std::string("error: ") + e.what());
      }
    };

    if (fe.contains("ttm"))
      guarded("ttm", [&] { run_ttm(c, spec, fe.at("ttm")); });
    if (fe.contains("densepre"))
      guarded("densepre", [&] { run_densepre(c, spec, fe.at("densepre")); });
    if (fe.contains("meyrath")) {
      int k = 0;
      for (const ojson& m : fe.at("meyrath")) {
        guarded("meyrath" + std::to_string(k),
                [&] { run_meyrath(c, spec, m, k); });
        ++k;
      }
    }
    if (fe.contains("marty_slope"))
      guarded("marty-slope",
              [&] { run_marty_slope(c, spec, fe.at("marty_slope")); });
    if (fe.contains("montel"))
      guarded("montel", [&] { run_montel(c, spec, fe.at("montel")); });
    if (fe.contains("omega")) {
      int k = 0;
      for (const ojson& m : fe.at("omega")) {
        guarded("omega" + std::to_string(k), [&] { run_omega(c, spec, m, k); });
        ++k;
      }
    }
    if (fe.contains("invariant"))
      guarded("invariant", [&] { run_invariant(c, spec, fe.at("invariant")); });
    if (fe.contains("expanding"))
      guarded("expanding", [&] { run_expanding(c, spec, fe.at("expanding")); });
    if (fe.contains("nonwandering"))
      guarded("nonwandering",
              [&] { run_nonwandering(c, spec, fe.at("nonwandering")); });
    if (fe.contains("julia"))
      guarded("julia", [&] { run_julia(c, spec, fe.at("julia")); });
  }

  {
    bool ok = res.meyrath_certified >= 6;
    res.lines.push_back({"corpus.meyrath-certified", ok,
                         std::to_string(res.meyrath_certified) +
                             " certified pairs (need >= 6)"});
    if (!ok) res.exit_code = 2;
  }

  std::ofstream s(fs::path(out_dir) / "summary.txt");
  s << res.summary();
  return res;
}

}  // namespace famdyn
