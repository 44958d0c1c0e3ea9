// famdyn — command-line front end over the family-dynamics library.
// One command per process; every analysis prints a JSON report on stdout.
// Exit codes: 0 done, 1 usage, 2 corpus assertion failure, 3 non-convergence.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "famdyn/corpus.hpp"
#include "famdyn/expr.hpp"
#include "famdyn/family.hpp"
#include "famdyn/normality.hpp"
#include "famdyn/orbits.hpp"
#include "famdyn/region.hpp"
#include "famdyn/report.hpp"
#include "famdyn/sphere.hpp"
#include "famdyn/transitivity.hpp"

namespace fd = famdyn;

namespace {

int exit_code_for(fd::Errc c) {
  switch (c) {
    case fd::Errc::no_converge:
    case fd::Errc::budget:
    case fd::Errc::boundary:
    case fd::Errc::essential:
    case fd::Errc::indeterminate:
      return 3;
    default:
      return 1;
  }
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size())
      throw fd::Error(fd::Errc::usage, "bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw fd::Error(fd::Errc::usage, "empty number list");
  return out;
}

std::vector<fd::XC> parse_xc_list(const std::string& text) {
  std::vector<fd::XC> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(fd::parse_point(tok));
  }
  if (out.empty()) throw fd::Error(fd::Errc::usage, "empty point list");
  return out;
}

std::vector<fd::Complex> parse_point_list(const std::string& text) {
  std::vector<fd::Complex> out;
  for (const fd::XC& z : parse_xc_list(text)) out.push_back(z.value());
  return out;
}

// Accepts both "rect:x0,y0,x1,y1" and the bare corner form "x0,y0,x1,y1".
fd::Region parse_region_flex(const std::string& text) {
  if (text.find(':') == std::string::npos &&
      std::count(text.begin(), text.end(), ',') == 3)
    return fd::Region::parse("rect:" + text);
  return fd::Region::parse(text);
}

void emit(const fd::AnalysisReport& rep, const std::string& out) {
  std::cout << rep.str();
  if (!out.empty()) rep.write(out);
}

struct Opts {
  std::string family, family2;
  long budget = 64;
  std::uint64_t seed = 0;

  std::string z0, points, target_points, net, net_points, net1, net2;
  std::string domain, target, codomain, region, window, b_region;
  std::string radii, marty_radii, seeds, exceptional;
  std::string mode = "agreement", target_expr, samples;
  std::string u_center, v_center;
  std::string out, pgm, corpus_dir = "corpus", out_dir = "corpus_out";

  double eps = 0.1, domain_eps = 0.1, target_eps = 0.1, net_eps = 0.1;
  double codomain_eps = 0.25, cluster_eps = 1e-6, tol = 1e-9;
  double radius = 0.5, threshold = fd::kDefaultMartyThreshold;
  double bound = fd::kDefaultMartyThreshold, k_eps = 0.25, pair_eps = 1e-9;
  double u_radius = 0.1, v_radius = 0.1;
  int grid_n = 41, px = 256;
  long q = 3;
  bool backward = false, certify = false, no_certify = false;
};

fd::EnumeratedFamily load(const Opts& o) {
  return fd::enumerate_family(fd::load_family_file(o.family), o.budget);
}

std::vector<fd::Complex> net_of(const std::string& region_text, double net_eps,
                                const std::string& points_text) {
  if (!points_text.empty()) return parse_point_list(points_text);
  if (region_text.empty())
    throw fd::Error(fd::Errc::usage, "a net region or point list is required");
  return fd::make_net(parse_region_flex(region_text), net_eps);
}

void add_cellset(fd::AnalysisReport& rep, const fd::CellSetResult& cs,
                 const std::string& pgm) {
  rep.params["marked"] = cs.marked_count();
  rep.params["cells"] = static_cast<long>(cs.grid.cells.size());
  for (const std::string& n : cs.notes) rep.notes.push_back(n);
  if (!pgm.empty()) cs.raster().write_pgm(pgm, cs.sidecar_json());
}

int run_orbit(const Opts& o) {
  fd::PointSet ps = fd::orbit_set(load(o), fd::parse_point(o.z0));
  std::cout << ps.csv();
  if (!o.out.empty()) ps.write_csv(o.out);
  return 0;
}

int run_omega(const Opts& o) {
  fd::PointSet om = fd::omega_limit(load(o), fd::parse_point(o.z0),
                                    o.cluster_eps);
  fd::AnalysisReport rep = fd::make_report("omega-limit", o.seed);
  rep.verdict = om.size() ? "nonempty" : "empty";
  rep.params["z0"] = o.z0;
  rep.params["budget"] = o.budget;
  rep.params["cluster_eps"] = o.cluster_eps;
  fd::ojson pts = fd::ojson::array();
  for (const auto& e : om.entries()) pts.push_back(fd::format_point(e.z));
  rep.params["omega"] = pts;
  for (const auto& e : om.entries()) {
    fd::ojson w = fd::ojson::object();
    w["point"] = fd::format_point(e.z);
    w["label"] = e.label;
    rep.witnesses.push_back(w);
  }
  emit(rep, o.out);
  return 0;
}

int run_invariant(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::PointSet S;
  for (const fd::XC& z : parse_xc_list(o.points)) S.add(z, fd::format_point(z));
  fd::InvarianceResult inv =
      o.backward ? fd::is_backward_invariant(fam, S, o.tol, o.seed)
                 : fd::is_forward_invariant(fam, S, o.tol);
  fd::AnalysisReport rep = fd::make_report(
      o.backward ? "backward-invariance" : "forward-invariance", o.seed);
  rep.verdict = inv.invariant ? "invariant" : "not-invariant";
  rep.params["tol"] = o.tol;
  for (const auto& w : inv.witnesses) {
    fd::ojson j = fd::ojson::object();
    j["label"] = w.label;
    j["z"] = fd::format_point(w.z);
    j["image"] = fd::format_point(w.image);
    if (w.err != fd::Errc::none) j["error"] = fd::errc_name(w.err);
    rep.witnesses.push_back(j);
  }
  rep.notes = inv.notes;
  emit(rep, o.out);
  return 0;
}

int run_nonwandering(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  if (!o.region.empty()) {
    fd::CellSetResult cs = fd::nonwandering_set(
        fam, parse_region_flex(o.region), o.eps, o.certify, o.seed);
    fd::AnalysisReport rep = fd::make_report("nonwandering-set", o.seed);
    rep.verdict = cs.marked_count() ? "nonempty" : "empty";
    rep.params["region"] = parse_region_flex(o.region).str();
    rep.params["eps"] = o.eps;
    add_cellset(rep, cs, o.pgm);
    emit(rep, o.out);
    return 0;
  }
  fd::NonwanderingResult nw =
      fd::is_nonwandering(fam, fd::parse_point(o.z0), parse_doubles(o.radii),
                          !o.no_certify, o.seed);
  fd::AnalysisReport rep = fd::make_report("nonwandering", o.seed);
  rep.verdict = nw.verdict;
  rep.params["z0"] = o.z0;
  if (nw.verdict != "nonwandering") rep.params["failed_radius"] = nw.failed_radius;
  for (const auto& w : nw.witnesses) {
    fd::ojson j = fd::ojson::object();
    j["radius"] = w.radius;
    j["label"] = w.label;
    j["z"] = fd::format_point(w.z);
    j["image"] = fd::format_point(w.image);
    j["count"] = w.count;
    j["method"] = w.method;
    rep.witnesses.push_back(j);
  }
  rep.notes = nw.notes;
  emit(rep, o.out);
  return 0;
}

int run_universal(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  std::vector<fd::Complex> target =
      net_of(o.target, o.target_eps, o.target_points);
  fd::CellSetResult cs = fd::universal_points(
      fam, parse_region_flex(o.domain), o.domain_eps, target, o.eps);
  fd::AnalysisReport rep = fd::make_report("universal-points", o.seed);
  long total = static_cast<long>(cs.grid.cells.size());
  rep.verdict = cs.marked_count() == total ? "all-universal"
                : cs.marked_count() > 0    ? "partial"
                                           : "none";
  rep.params["domain"] = parse_region_flex(o.domain).str();
  rep.params["targets"] = static_cast<long>(target.size());
  rep.params["eps"] = o.eps;
  add_cellset(rep, cs, o.pgm);
  emit(rep, o.out);
  return 0;
}

int run_hull(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::CellSetResult cs = fd::forward_invariant_hull(
      fam, parse_point_list(o.seeds), parse_region_flex(o.region), o.eps);
  fd::AnalysisReport rep = fd::make_report("forward-invariant-hull", o.seed);
  rep.verdict = cs.escaped ? "escaped"
                : cs.proper ? "proper-subset"
                            : "full-region";
  rep.params["region"] = parse_region_flex(o.region).str();
  rep.params["eps"] = o.eps;
  add_cellset(rep, cs, o.pgm);
  emit(rep, o.out);
  return 0;
}

int run_transitive(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  std::vector<fd::Complex> net = net_of(o.net, o.net_eps, o.net_points);
  std::vector<double> radii = parse_doubles(o.radii);
  std::optional<fd::Region> B;
  if (!o.b_region.empty()) B = parse_region_flex(o.b_region);
  fd::AnalysisReport rep =
      o.domain.empty()
          ? fd::is_transitive_at(fam, fd::parse_point(o.z0), radii, net, o.eps,
                                 B, o.seed)
          : fd::is_transitive(fam, parse_region_flex(o.domain), radii, net,
                              o.eps, B, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_minimal(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  std::vector<fd::Complex> target =
      net_of(o.target, o.target_eps, o.target_points);
  fd::AnalysisReport rep =
      fd::is_minimal(fam, parse_region_flex(o.domain), o.domain_eps, target,
                     o.eps, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_densepre(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  std::vector<fd::Complex> net = net_of(o.net, o.net_eps, o.net_points);
  fd::AnalysisReport rep =
      fd::dense_preimage_test(fam, net, o.eps, parse_region_flex(o.domain),
                              o.domain_eps, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_mixing(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::AnalysisReport rep = fd::is_weakly_mixing_at(
      fam, fd::parse_point(o.z0), parse_doubles(o.radii),
      parse_point_list(o.net1), parse_point_list(o.net2), o.eps, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_expanding(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  std::vector<fd::Complex> K = net_of(o.target, o.k_eps, o.target_points);
  std::vector<fd::XC> E = parse_xc_list(o.exceptional);
  std::vector<double> radii = parse_doubles(o.radii);
  fd::AnalysisReport rep;
  if (!o.net.empty() || !o.net_points.empty()) {
    std::vector<fd::Complex> net = net_of(o.net, o.net_eps, o.net_points);
    rep = fd::expanding_implies_transitive_check(
        fam, fd::parse_point(o.z0), K, o.k_eps, E, radii, o.q, net, o.eps,
        o.seed);
  } else {
    rep = fd::is_expanding_at(fam, fd::parse_point(o.z0), K, o.k_eps, E,
                              radii, o.q, o.seed);
  }
  emit(rep, o.out);
  return 0;
}

int run_witness(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::WitnessSearch ws = fd::compact_transitive_witness(
      fam, fd::parse_point(o.z0), fd::parse_point(o.u_center).value(),
      o.u_radius, fd::parse_point(o.v_center).value(), o.v_radius, o.eps);
  fd::AnalysisReport rep = fd::make_report("compact-witness", o.seed);
  rep.verdict = ws.found ? "found" : "not-found";
  rep.params["z0"] = o.z0;
  rep.params["u"] = o.u_center;
  rep.params["u_radius"] = o.u_radius;
  rep.params["v"] = o.v_center;
  rep.params["v_radius"] = o.v_radius;
  if (ws.found) {
    fd::ojson w = fd::ojson::object();
    w["label"] = ws.label;
    w["value"] = fd::format_point(ws.value);
    w["dist"] = ws.dist;
    rep.witnesses.push_back(w);
  }
  emit(rep, o.out);
  return 0;
}

int run_transfer(const Opts& o) {
  fd::EnumeratedFamily F = load(o);
  fd::EnumeratedFamily G =
      fd::enumerate_family(fd::load_family_file(o.family2), o.budget);
  fd::AnalysisReport rep = fd::transitivity_transfer_check(
      F, G, o.mode, fd::parse_point(o.z0), o.pair_eps, parse_doubles(o.radii),
      net_of(o.net, o.net_eps, o.net_points), o.eps, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_closure(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::Expr target = fd::parse_expr(o.target_expr);
  fd::PointSet samples;
  for (const fd::XC& z : parse_xc_list(o.samples))
    samples.add(z, fd::format_point(z));
  fd::ClosureResult cr = fd::closure_contains(fam, target, samples, o.eps);
  fd::AnalysisReport rep = fd::make_report("closure-membership", o.seed);
  rep.verdict = cr.contained ? "contained" : "not-found";
  rep.params["target"] = fd::print_expr(target);
  rep.params["eps"] = o.eps;
  rep.params["sup"] = cr.sup;
  if (cr.contained) {
    fd::ojson w = fd::ojson::object();
    w["label"] = cr.label;
    w["sup"] = cr.sup;
    rep.witnesses.push_back(w);
  }
  emit(rep, o.out);
  return 0;
}

int run_marty(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::MartyProfile mp =
      fd::marty_profile(fam, fd::parse_point(o.z0), o.radius, o.grid_n);
  fd::AnalysisReport rep = fd::make_report("marty-profile", o.seed);
  rep.verdict = "computed";
  rep.params["z0"] = o.z0;
  rep.params["radius"] = o.radius;
  rep.params["max_sup"] = mp.max_sup;
  rep.params["slope"] = mp.slope;
  rep.params["usable"] = mp.usable;
  for (const auto& s : mp.sups) {
    fd::ojson w = fd::ojson::object();
    w["label"] = s.label;
    w["sup"] = s.sup;
    if (!s.ok) w["failed"] = true;
    rep.witnesses.push_back(w);
  }
  rep.notes = mp.notes;
  emit(rep, o.out);
  return 0;
}

int run_normal(const Opts& o) {
  fd::AnalysisReport rep =
      fd::is_normal_at(load(o), fd::parse_point(o.z0), parse_doubles(o.radii),
                       o.threshold, o.grid_n, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_omitted(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::CellSetResult cs = fd::omitted_values(
      fam, parse_region_flex(o.domain), o.domain_eps,
      parse_region_flex(o.codomain), o.codomain_eps, o.seed);
  fd::AnalysisReport rep = fd::make_report("omitted-values", o.seed);
  long total = static_cast<long>(cs.grid.cells.size());
  long omitted = total - cs.marked_count();
  rep.verdict = omitted > 0 ? "omitted-cells" : "no-omitted-cells";
  rep.params["domain"] = parse_region_flex(o.domain).str();
  rep.params["codomain"] = parse_region_flex(o.codomain).str();
  rep.params["omitted"] = omitted;
  add_cellset(rep, cs, o.pgm);
  emit(rep, o.out);
  return 0;
}

int run_montel(const Opts& o) {
  fd::AnalysisReport rep = fd::montel_consistency(
      load(o), parse_region_flex(o.domain), o.domain_eps,
      parse_region_flex(o.codomain), o.codomain_eps, o.threshold, o.bound,
      o.seed);
  emit(rep, o.out);
  return 0;
}

int run_julia(const Opts& o) {
  fd::EnumeratedFamily fam = load(o);
  fd::FatouJulia fj = fd::fatou_julia(fam, parse_region_flex(o.window), o.px,
                                      o.threshold, o.seed);
  std::string meta = fj.sidecar_json(o.budget, o.threshold);
  std::string out = o.out.empty() ? "julia.pgm" : o.out;
  fj.raster().write_pgm(out, meta);
  std::cout << meta;
  if (meta.empty() || meta.back() != '\n') std::cout << "\n";
  return 0;
}

int run_equiv(const Opts& o) {
  fd::AnalysisReport rep = fd::weakly_mixing_equivalence_check(
      load(o), fd::parse_point(o.z0), parse_doubles(o.marty_radii),
      o.threshold, parse_doubles(o.radii), parse_point_list(o.net1),
      parse_point_list(o.net2), o.eps, o.seed);
  emit(rep, o.out);
  return 0;
}

int run_corpus_cmd(const Opts& o) {
  fd::CorpusOutcome out = fd::run_corpus(o.corpus_dir, o.out_dir, o.seed);
  std::cout << out.summary();
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"family dynamics toolkit"};
  app.require_subcommand(1);
  Opts o;
  int (*runner)(const Opts&) = nullptr;

  auto common = [&](CLI::App* s, bool family_required = true) {
    auto* f = s->add_option("--family", o.family, "family spec file");
    if (family_required) f->required();
    s->add_option("--budget", o.budget, "member prefix length")
        ->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "sampling seed");
    s->add_option("--out", o.out, "also write the report/CSV here");
  };
  auto pick = [&](CLI::App* s, int (*fn)(const Opts&)) {
    s->callback([&o, fn, &runner] { runner = fn; (void)o; });
  };

  {
    auto* s = app.add_subcommand("orbit", "orbit of a point as CSV");
    common(s);
    s->add_option("--z0", o.z0)->required();
    pick(s, run_orbit);
  }
  {
    auto* s = app.add_subcommand("omega", "omega-limit set of a point");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--cluster-eps", o.cluster_eps)->check(CLI::PositiveNumber);
    pick(s, run_omega);
  }
  {
    auto* s = app.add_subcommand("invariant", "forward/backward invariance");
    common(s);
    s->add_option("--points", o.points, "comma-separated points")->required();
    s->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
    s->add_flag("--backward", o.backward, "check preimages instead");
    pick(s, run_invariant);
  }
  {
    auto* s = app.add_subcommand("nonwandering",
                                 "nonwandering point or cell set");
    common(s);
    s->add_option("--z0", o.z0, "point mode");
    s->add_option("--radii", o.radii, "point mode radii, decreasing");
    s->add_option("--region", o.region, "set mode region");
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_flag("--certify", o.certify, "set mode: winding certificates");
    s->add_flag("--no-certify", o.no_certify, "point mode: samples only");
    s->add_option("--pgm", o.pgm, "set mode raster output");
    pick(s, run_nonwandering);
  }
  {
    auto* s = app.add_subcommand("universal", "universal-point cell set");
    common(s);
    s->add_option("--domain", o.domain)->required();
    s->add_option("--domain-eps", o.domain_eps)->check(CLI::PositiveNumber);
    s->add_option("--target", o.target, "target region");
    s->add_option("--target-eps", o.target_eps)->check(CLI::PositiveNumber);
    s->add_option("--target-points", o.target_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_option("--pgm", o.pgm);
    pick(s, run_universal);
  }
  {
    auto* s = app.add_subcommand("hull", "forward-invariant hull of seeds");
    common(s);
    s->add_option("--seeds", o.seeds)->required();
    s->add_option("--region", o.region)->required();
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_option("--pgm", o.pgm);
    pick(s, run_hull);
  }
  {
    auto* s = app.add_subcommand("transitive", "topological transitivity");
    common(s);
    s->add_option("--z0", o.z0, "single base point");
    s->add_option("--domain", o.domain, "base region");
    s->add_option("--radii", o.radii)->required();
    s->add_option("--net", o.net, "target net region");
    s->add_option("--net-eps", o.net_eps)->check(CLI::PositiveNumber);
    s->add_option("--net-points", o.net_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_option("--b", o.b_region, "restrict targets near this region");
    pick(s, run_transitive);
  }
  {
    auto* s = app.add_subcommand("minimal", "orbit density over a domain");
    common(s);
    s->add_option("--domain", o.domain)->required();
    s->add_option("--domain-eps", o.domain_eps)->check(CLI::PositiveNumber);
    s->add_option("--target", o.target);
    s->add_option("--target-eps", o.target_eps)->check(CLI::PositiveNumber);
    s->add_option("--target-points", o.target_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_minimal);
  }
  {
    auto* s = app.add_subcommand("densepre", "dense-preimage formulation");
    common(s);
    s->add_option("--net", o.net);
    s->add_option("--net-eps", o.net_eps)->check(CLI::PositiveNumber);
    s->add_option("--net-points", o.net_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_option("--domain", o.domain)->required();
    s->add_option("--domain-eps", o.domain_eps)->check(CLI::PositiveNumber);
    pick(s, run_densepre);
  }
  {
    auto* s = app.add_subcommand("mixing", "weak mixing at a point");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--radii", o.radii)->required();
    s->add_option("--net1", o.net1)->required();
    s->add_option("--net2", o.net2)->required();
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_mixing);
  }
  {
    auto* s = app.add_subcommand("expanding", "expansion at a point");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--k-region", o.target, "compact set as a region net");
    s->add_option("--k-points", o.target_points);
    s->add_option("--k-eps", o.k_eps)->check(CLI::PositiveNumber);
    s->add_option("--exceptional", o.exceptional)->required();
    s->add_option("--radii", o.radii)->required();
    s->add_option("--q", o.q, "distinct covering members per point")
        ->check(CLI::PositiveNumber);
    s->add_option("--net", o.net, "adding a target net runs the implication");
    s->add_option("--net-eps", o.net_eps)->check(CLI::PositiveNumber);
    s->add_option("--net-points", o.net_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_expanding);
  }
  {
    auto* s = app.add_subcommand("witness", "first compact-open witness");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--u-center", o.u_center)->required();
    s->add_option("--u-radius", o.u_radius)->check(CLI::PositiveNumber);
    s->add_option("--v-center", o.v_center)->required();
    s->add_option("--v-radius", o.v_radius)->check(CLI::PositiveNumber);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_witness);
  }
  {
    auto* s = app.add_subcommand("transfer", "transitivity transfer F -> G");
    common(s);
    s->add_option("--family2", o.family2)->required();
    s->add_option("--mode", o.mode)
        ->check(CLI::IsMember({"agreement", "proximity"}));
    s->add_option("--z0", o.z0)->required();
    s->add_option("--pair-eps", o.pair_eps)->check(CLI::PositiveNumber);
    s->add_option("--radii", o.radii)->required();
    s->add_option("--net", o.net);
    s->add_option("--net-eps", o.net_eps)->check(CLI::PositiveNumber);
    s->add_option("--net-points", o.net_points);
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_transfer);
  }
  {
    auto* s = app.add_subcommand("closure", "closure membership of a map");
    common(s);
    s->add_option("--target", o.target_expr, "target expression")->required();
    s->add_option("--samples", o.samples)->required();
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_closure);
  }
  {
    auto* s = app.add_subcommand("marty", "spherical-derivative profile");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--radius", o.radius)->check(CLI::PositiveNumber);
    s->add_option("--grid-n", o.grid_n)->check(CLI::Range(3, 201));
    pick(s, run_marty);
  }
  {
    auto* s = app.add_subcommand("normal", "normality at a point");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--radii", o.radii)->required();
    s->add_option("--threshold", o.threshold)->check(CLI::PositiveNumber);
    s->add_option("--grid-n", o.grid_n)->check(CLI::Range(3, 201));
    pick(s, run_normal);
  }
  {
    auto* s = app.add_subcommand("omitted", "omitted codomain cells");
    common(s);
    s->add_option("--domain", o.domain)->required();
    s->add_option("--domain-eps", o.domain_eps)->check(CLI::PositiveNumber);
    s->add_option("--codomain", o.codomain)->required();
    s->add_option("--codomain-eps", o.codomain_eps)
        ->check(CLI::PositiveNumber);
    s->add_option("--pgm", o.pgm);
    pick(s, run_omitted);
  }
  {
    auto* s = app.add_subcommand("montel", "three-omitted-values consistency");
    common(s);
    s->add_option("--domain", o.domain)->required();
    s->add_option("--domain-eps", o.domain_eps)->check(CLI::PositiveNumber);
    s->add_option("--codomain", o.codomain)->required();
    s->add_option("--codomain-eps", o.codomain_eps)
        ->check(CLI::PositiveNumber);
    s->add_option("--threshold", o.threshold)->check(CLI::PositiveNumber);
    s->add_option("--bound", o.bound)->check(CLI::PositiveNumber);
    pick(s, run_montel);
  }
  {
    auto* s = app.add_subcommand("julia", "pixel mask of the non-normal set");
    common(s);
    s->add_option("--window", o.window)->required();
    s->add_option("--px", o.px)->check(CLI::Range(16, 4096));
    s->add_option("--threshold", o.threshold)->check(CLI::PositiveNumber);
    pick(s, run_julia);
  }
  {
    auto* s = app.add_subcommand("equiv", "normality vs mixing cross-check");
    common(s);
    s->add_option("--z0", o.z0)->required();
    s->add_option("--marty-radii", o.marty_radii)->required();
    s->add_option("--threshold", o.threshold)->check(CLI::PositiveNumber);
    s->add_option("--radii", o.radii)->required();
    s->add_option("--net1", o.net1)->required();
    s->add_option("--net2", o.net2)->required();
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    pick(s, run_equiv);
  }
  {
    auto* s = app.add_subcommand("corpus", "run the pinned check battery");
    s->add_option("--dir", o.corpus_dir, "corpus directory");
    s->add_option("--out-dir", o.out_dir, "report output directory");
    s->add_option("--seed", o.seed);
    pick(s, run_corpus_cmd);
  }

  try {
    app.parse(argc, argv);
    return runner ? runner(o) : 1;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    if (rc == 0) return 0;  // --help
    std::cerr << fd::error_json(fd::Error(fd::Errc::usage, e.what()));
    return 1;
  } catch (const fd::Error& e) {
    std::cerr << fd::error_json(e);
    return exit_code_for(e.code);
  } catch (const std::exception& e) {
    std::cerr << fd::error_json(fd::Error(fd::Errc::usage, e.what()));
    return 1;
  }
}
