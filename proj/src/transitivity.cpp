#include "famdyn/transitivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "famdyn/orbits.hpp"
#include "famdyn/solve.hpp"

namespace famdyn {
namespace {

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

Complex finite_center(const XC& z0, const char* what) {
  if (z0.is_inf())
    throw Error(Errc::precondition, std::string(what) + " must be finite");
  return z0.value();
}

std::vector<Complex> filter_net(const std::vector<Complex>& net,
                                const std::optional<Region>& B, double eps) {
  if (!B) return net;
  std::vector<Complex> out;
  for (const Complex& w : net)
    if (B->dist(w) <= eps) out.push_back(w);
  if (out.empty())
    throw Error(Errc::precondition,
                "no codomain net point lies within eps of the reference set");
  return out;
}

// interior samples of D(z0,r) with all member images, evaluated in one pass
struct SampleBank {
  std::vector<Complex> samples;
  std::vector<std::vector<EvalResult>> images;  // [sample][member]
  bool had_errors = false;
};

SampleBank sample_disk(const EnumeratedFamily& fam, const Complex& z0,
                       double r) {
  Region disk;
  disk.kind = Region::Kind::disk;
  disk.center = z0;
  disk.r1 = r;
  SampleBank b;
  b.samples.push_back(z0);
  for (const Complex& s : make_net(disk, r / 4))
    if (std::abs(s - z0) < r * (1 - 1e-9)) b.samples.push_back(s);
  b.images.resize(b.samples.size());
  for (std::size_t s = 0; s < b.samples.size(); ++s) {
    fam.eval_all(XC(b.samples[s]), b.images[s]);
    for (const EvalResult& e : b.images[s]) b.had_errors = b.had_errors || !e.ok;
  }
  return b;
}

struct Meet {
  bool met = false;
  bool certified = false;
  std::size_t member = 0;
  bool have_sample = false;
  Complex sample;
  XC image;
  long count = 0;
  const char* method = "sample";
};

/// First member whose sampled image of D(z0,r) lands in D(w,eps) (chordal),
/// upgraded to an argument-principle certificate for rational members; when
/// sampling misses and `sweep` is set, rational members are probed for
/// solutions of f = w inside the disk.
Meet find_meet(const EnumeratedFamily& fam, const SampleBank& bank,
               const Complex& z0, double r, const XC& w, double eps,
               bool sweep, bool& dirty, bool& cert_failed) {
  Meet m;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t s = 0; s < bank.samples.size(); ++s) {
      const EvalResult& e = bank.images[s][i];
      if (!e.ok || chordal(e.v, w) > eps) continue;
      m.met = true;
      m.member = i;
      m.have_sample = true;
      m.sample = bank.samples[s];
      m.image = e.v;
      if (fam.members[i].rational) {
        try {
          long c = count_solutions_in(fam.members[i].expr, e.v, z0, r);
          if (c > 0) {
            m.certified = true;
            m.count = c;
            m.method = "winding";
            return m;
          }
          cert_failed = true;
        } catch (const Error&) {
          cert_failed = true;
        }
      }
      m.method = "sample";
      return m;
    }
  }
  if (sweep) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (!fam.members[i].rational) continue;
      try {
        long c = count_solutions_in(fam.members[i].expr, w, z0, r);
        if (c > 0) {
          m.met = true;
          m.certified = true;
          m.member = i;
          m.image = w;
          m.count = c;
          m.method = "winding-sweep";
          return m;
        }
      } catch (const Error&) {
        dirty = true;
      }
    }
  }
  if (bank.had_errors) dirty = true;
  return m;
}

struct WitnessSink {
  ojson arr = ojson::array();
  long suppressed = 0;
  static constexpr long kCap = 64;
  void push(ojson w) {
    if (arr.size() < kCap)
      arr.push_back(std::move(w));
    else
      ++suppressed;
  }
};

ojson meet_witness(const EnumeratedFamily& fam, double r,
                   const std::optional<Complex>& base, const XC& target,
                   const Meet& m) {
  ojson w = ojson::object();
  w["radius"] = r;
  if (base) w["base"] = format_point(XC(*base));
  w["target"] = format_point(target);
  w["label"] = fam.members[m.member].label;
  w["method"] = m.method;
  if (m.have_sample) w["sample"] = format_point(XC(m.sample));
  w["image"] = format_point(m.image);
  if (m.certified) w["count"] = m.count;
  return w;
}

ojson fail_witness(double r, const std::optional<Complex>& base,
                   const XC& target, const std::string& reason) {
  ojson w = ojson::object();
  w["radius"] = r;
  if (base) w["base"] = format_point(XC(*base));
  w["target"] = format_point(target);
  w["reason"] = reason;
  return w;
}

struct CoreResult {
  bool holds = true;
  bool heuristic = false;
  bool dirty = false;
  bool cert_failed = false;
  ojson fail;  // the failing pair, when !holds
};

/// All (radius, net point) pairs for one base point, into `sink`.
CoreResult transitive_core(const EnumeratedFamily& fam, const Complex& z0,
                           const std::vector<double>& radii,
                           const std::vector<Complex>& net, double eps,
                           const std::optional<Complex>& base,
                           WitnessSink& sink) {
  CoreResult res;
  for (double r : radii) {
    SampleBank bank = sample_disk(fam, z0, r);
    for (const Complex& w : net) {
      bool dirty = false, cert_failed = false;
      Meet m = find_meet(fam, bank, z0, r, XC(w), eps, true, dirty, cert_failed);
      res.cert_failed = res.cert_failed || cert_failed;
      if (!m.met) {
        res.holds = false;
        res.dirty = dirty;
        res.fail = fail_witness(r, base, XC(w),
                                "no member image met the target disk");
        return res;
      }
      if (!m.certified) res.heuristic = true;
      sink.push(meet_witness(fam, r, base, XC(w), m));
    }
  }
  return res;
}

void finish_meet_report(AnalysisReport& rep, const CoreResult& res,
                        WitnessSink& sink) {
  if (res.holds) {
    rep.verdict = res.heuristic ? "holds (heuristic)" : "holds-with-witness";
    if (res.heuristic)
      rep.notes.push_back(
          "heuristic: some witnesses rest on sampling without an "
          "argument-principle certificate");
  } else {
    rep.verdict = res.dirty ? "inconclusive" : "fails-at-resolution";
    sink.arr = ojson::array();
    sink.arr.push_back(res.fail);
    sink.suppressed = 0;
    if (res.dirty)
      rep.notes.push_back(
          "evaluation or winding errors polluted the failure claim");
  }
  if (res.cert_failed)
    rep.notes.push_back(
        "some sampled hits could not be re-certified by winding and were "
        "kept as samples");
  if (sink.suppressed)
    rep.notes.push_back(std::to_string(sink.suppressed) +
                        " further witnesses suppressed");
  rep.witnesses = std::move(sink.arr);
}

bool verdict_holds(const std::string& v) {
  return v == "holds-with-witness" || v == "holds (heuristic)";
}

}  // namespace

AnalysisReport is_transitive_at(const EnumeratedFamily& fam, const XC& z0,
                                const std::vector<double>& radii,
                                const std::vector<Complex>& net, double eps,
                                const std::optional<Region>& B,
                                std::uint64_t seed) {
  Complex c0 = finite_center(z0, "base point");
  check_radii(radii);
  if (!(eps > 0)) throw Error(Errc::precondition, "eps must be > 0");
  if (net.empty()) throw Error(Errc::precondition, "codomain net is empty");
  std::vector<Complex> vnet = filter_net(net, B, eps);

  AnalysisReport rep = make_report("is_transitive_at", seed);
  rep.params["z0"] = format_point(z0);
  rep.params["radii"] = radii;
  rep.params["eps"] = eps;
  rep.params["net_size"] = vnet.size();
  rep.params["budget"] = fam.size();
  if (B) rep.params["wrt"] = B->str();
  rep.notes.push_back(
      "open sets are modeled as chordal net disks at the stated resolution");

  WitnessSink sink;
  CoreResult res = transitive_core(fam, c0, radii, vnet, eps, std::nullopt, sink);
  finish_meet_report(rep, res, sink);
  return rep;
}

AnalysisReport is_transitive(const EnumeratedFamily& fam, const Region& domain,
                             const std::vector<double>& radii,
                             const std::vector<Complex>& net, double eps,
                             const std::optional<Region>& B,
                             std::uint64_t seed) {
  check_radii(radii);
  if (!(eps > 0)) throw Error(Errc::precondition, "eps must be > 0");
  if (net.empty()) throw Error(Errc::precondition, "codomain net is empty");
  std::vector<Complex> vnet = filter_net(net, B, eps);
  std::vector<Complex> bases = make_net(domain, radii.front());

  AnalysisReport rep = make_report("is_transitive", seed);
  rep.params["domain"] = domain.str();
  rep.params["base_count"] = bases.size();
  rep.params["radii"] = radii;
  rep.params["eps"] = eps;
  rep.params["net_size"] = vnet.size();
  rep.params["budget"] = fam.size();
  if (B) rep.params["wrt"] = B->str();
  rep.notes.push_back(
      "open sets are modeled as chordal net disks at the stated resolution");

  WitnessSink sink;
  CoreResult agg;
  for (const Complex& b : bases) {
    CoreResult res = transitive_core(fam, b, radii, vnet, eps, b, sink);
    agg.heuristic = agg.heuristic || res.heuristic;
    agg.cert_failed = agg.cert_failed || res.cert_failed;
    if (!res.holds) {
      agg.holds = false;
      agg.dirty = res.dirty;
      agg.fail = res.fail;
      break;
    }
  }
  finish_meet_report(rep, agg, sink);
  return rep;
}

AnalysisReport is_minimal(const EnumeratedFamily& fam, const Region& domain,
                          double domain_eps, const std::vector<Complex>& target,
                          double eps, std::uint64_t seed) {
  AnalysisReport rep = make_report("is_minimal", seed);
  rep.params["domain"] = domain.str();
  rep.params["domain_eps"] = domain_eps;
  rep.params["target_size"] = target.size();
  rep.params["eps"] = eps;
  rep.params["budget"] = fam.size();

  CellSetResult cells = universal_points(fam, domain, domain_eps, target, eps);
  long marked = cells.marked_count();
  rep.params["cells"] = cells.grid.cells.size();
  if (marked == static_cast<long>(cells.grid.cells.size())) {
    rep.verdict = "holds-with-witness";
    ojson w = ojson::object();
    w["universal_cells"] = marked;
    w["targets"] = target.size();
    rep.witnesses.push_back(w);
    rep.notes.push_back("every domain cell center is universal at this "
                        "resolution and budget");
  } else {
    rep.verdict = "fails-at-resolution";
    for (std::size_t k = 0; k < cells.grid.cells.size(); ++k)
      if (!cells.marks[k]) {
        const Complex c = cells.grid.cells[k].center;
        // the first target its orbit misses, for the record
        std::vector<EvalResult> vals = fam.eval_all(XC(c));
        bool dirty = false;
        for (const EvalResult& v : vals) dirty = dirty || !v.ok;
        if (dirty) {
          // a failing orbit evaluation pollutes the miss claim
          rep.verdict = "inconclusive";
          rep.notes.push_back(
              "evaluation errors polluted the density claim at the failing "
              "cell");
        }
        ojson w = ojson::object();
        w["cell"] = format_point(XC(c));
        for (const Complex& t : target) {
          bool hit = false;
          for (const EvalResult& v : vals)
            if (v.ok && chordal(v.v, XC(t)) <= eps) {
              hit = true;
              break;
            }
          if (!hit) {
            w["missed_target"] = format_point(XC(t));
            break;
          }
        }
        rep.witnesses.push_back(w);
        break;
      }
  }
  return rep;
}

AnalysisReport dense_preimage_test(const EnumeratedFamily& fam,
                                   const std::vector<Complex>& net, double eps,
                                   const Region& domain, double domain_eps,
                                   std::uint64_t seed) {
  if (net.empty()) throw Error(Errc::precondition, "codomain net is empty");
  if (!(eps > 0)) throw Error(Errc::precondition, "eps must be > 0");
  AnalysisReport rep = make_report("dense_preimage_test", seed);
  rep.params["domain"] = domain.str();
  rep.params["domain_eps"] = domain_eps;
  rep.params["eps"] = eps;
  rep.params["net_size"] = net.size();
  rep.params["budget"] = fam.size();

  Grid grid = make_grid(domain, domain_eps);
  rep.params["cells"] = grid.cells.size();
  bool heuristic = false;
  std::vector<std::string> skipped;

  for (const Complex& w : net) {
    std::vector<Complex> subnet{w, w + Complex(eps / 2, 0),
                                w - Complex(eps / 2, 0),
                                w + Complex(0, eps / 2),
                                w - Complex(0, eps / 2)};
    std::vector<std::uint8_t> marked(grid.cells.size(), 0);
    long unmarked = static_cast<long>(grid.cells.size());

    for (std::size_t i = 0; i < fam.size() && unmarked > 0; ++i) {
      const Member& m = fam.members[i];
      if (m.rational) {
        for (const Complex& w2 : subnet) {
          if (unmarked == 0) break;
          try {
            for (const Preimage& q : preimages(m.expr, XC(w2), seed)) {
              if (q.z.is_inf()) continue;
              auto ci = grid.cell_index(q.z.value());
              if (ci && !marked[*ci]) {
                marked[*ci] = 1;
                --unmarked;
              }
            }
          } catch (const Error& e) {
            if (e.code == Errc::precondition) {
              // constant member sitting on the target: preimage is the
              // whole sphere, every cell is hit
              std::fill(marked.begin(), marked.end(), 1);
              unmarked = 0;
              break;
            }
            if (skipped.size() < 8)
              skipped.push_back("member '" + m.label + "' skipped (" +
                                errc_name(e.code) + ")");
            break;
          }
        }
      } else {
        // subsample the still-unmarked cells and test forward images
        heuristic = true;
        for (std::size_t k = 0; k < grid.cells.size(); ++k) {
          if (marked[k]) continue;
          const Complex c = grid.cells[k].center;
          for (int dy = -1; dy <= 1 && !marked[k]; ++dy)
            for (int dx = -1; dx <= 1 && !marked[k]; ++dx) {
              Complex s = c + Complex(dx * domain_eps / 3.0,
                                      dy * domain_eps / 3.0);
              try {
                XC v = eval_at(m.expr, XC(s));
                if (chordal(v, XC(w)) <= eps) {
                  marked[k] = 1;
                  --unmarked;
                }
              } catch (const Error&) {
              }
            }
        }
      }
    }

    if (unmarked > 0) {
      rep.verdict = "fails-at-resolution";
      for (std::size_t k = 0; k < grid.cells.size(); ++k)
        if (!marked[k]) {
          ojson fw = ojson::object();
          fw["target"] = format_point(XC(w));
          fw["cell"] = format_point(XC(grid.cells[k].center));
          fw["reason"] = "no member preimage of the value disk meets the cell";
          rep.witnesses.push_back(fw);
          break;
        }
      for (const std::string& s : skipped) rep.notes.push_back(s);
      if (heuristic)
        rep.notes.push_back("heuristic: non-rational members handled by "
                            "cell subsampling");
      return rep;
    }
  }

  rep.verdict = heuristic ? "holds (heuristic)" : "holds-with-witness";
  ojson w = ojson::object();
  w["value_disks"] = net.size();
  w["cells"] = grid.cells.size();
  rep.witnesses.push_back(w);
  for (const std::string& s : skipped) rep.notes.push_back(s);
  if (heuristic)
    rep.notes.push_back(
        "heuristic: non-rational members handled by cell subsampling");
  return rep;
}

AnalysisReport is_weakly_mixing_at(const EnumeratedFamily& fam, const XC& z0,
                                   const std::vector<double>& radii,
                                   const std::vector<Complex>& net1,
                                   const std::vector<Complex>& net2, double eps,
                                   std::uint64_t seed) {
  Complex c0 = finite_center(z0, "base point");
  check_radii(radii);
  if (net1.empty() || net2.empty())
    throw Error(Errc::precondition, "both codomain nets must be nonempty");
  if (!(eps > 0)) throw Error(Errc::precondition, "eps must be > 0");

  AnalysisReport rep = make_report("is_weakly_mixing_at", seed);
  rep.params["z0"] = format_point(z0);
  rep.params["radii"] = radii;
  rep.params["eps"] = eps;
  rep.params["net1_size"] = net1.size();
  rep.params["net2_size"] = net2.size();
  rep.params["budget"] = fam.size();

  WitnessSink sink;
  bool heuristic = false, cert_failed = false;
  for (double r : radii) {
    SampleBank bank = sample_disk(fam, c0, r);
    // first hitting sample per (member, net point); 0 = none
    auto hits = [&](const std::vector<Complex>& net) {
      std::vector<std::vector<std::size_t>> h(
          fam.size(), std::vector<std::size_t>(net.size(), 0));
      for (std::size_t i = 0; i < fam.size(); ++i)
        for (std::size_t p = 0; p < net.size(); ++p)
          for (std::size_t s = 0; s < bank.samples.size(); ++s) {
            const EvalResult& e = bank.images[s][i];
            if (e.ok && chordal(e.v, XC(net[p])) <= eps) {
              h[i][p] = s + 1;
              break;
            }
          }
      return h;
    };
    auto h1 = hits(net1), h2 = hits(net2);
    std::map<std::pair<std::size_t, std::size_t>, long> memo1, memo2;
    auto covered = [&](std::map<std::pair<std::size_t, std::size_t>, long>& memo,
                       const std::vector<Complex>& net, std::size_t i,
                       std::size_t p, bool& dirty) {
      auto key = std::make_pair(i, p);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      long c = 0;
      if (fam.members[i].rational) {
        try {
          c = count_solutions_in(fam.members[i].expr, XC(net[p]), c0, r);
        } catch (const Error&) {
          dirty = true;
          c = 0;
        }
      }
      memo[key] = c;
      return c;
    };

    for (std::size_t p1 = 0; p1 < net1.size(); ++p1)
      for (std::size_t p2 = 0; p2 < net2.size(); ++p2) {
        bool found = false, dirty = false;
        for (std::size_t i = 0; i < fam.size() && !found; ++i) {
          std::size_t s1 = h1[i][p1], s2 = h2[i][p2];
          bool m1 = s1 > 0, m2 = s2 > 0;
          long c1 = 0, c2 = 0;
          if (!m1) {
            c1 = covered(memo1, net1, i, p1, dirty);
            m1 = c1 > 0;
          }
          if (!m2) {
            c2 = covered(memo2, net2, i, p2, dirty);
            m2 = c2 > 0;
          }
          if (!(m1 && m2)) continue;
          found = true;
          bool cert = fam.members[i].rational;
          // certify any end that was met by sampling alone
          auto certify = [&](std::size_t s, long& c) {
            if (c > 0 || !cert) return;
            const EvalResult& e = bank.images[s - 1][i];
            try {
              long n = count_solutions_in(fam.members[i].expr, e.v, c0, r);
              if (n > 0)
                c = n;
              else
                cert = false;
            } catch (const Error&) {
              cert = false;
            }
          };
          certify(s1, c1);
          certify(s2, c2);
          if (!cert) {
            heuristic = true;
            cert_failed = cert_failed || fam.members[i].rational;
          }
          ojson w = ojson::object();
          w["radius"] = r;
          w["target1"] = format_point(XC(net1[p1]));
          w["target2"] = format_point(XC(net2[p2]));
          w["label"] = fam.members[i].label;
          w["method"] = cert ? "winding" : "sample";
          if (s1) w["sample1"] = format_point(XC(bank.samples[s1 - 1]));
          if (s2) w["sample2"] = format_point(XC(bank.samples[s2 - 1]));
          if (c1 > 0) w["count1"] = c1;
          if (c2 > 0) w["count2"] = c2;
          sink.push(std::move(w));
        }
        if (!found) {
          rep.verdict = (dirty || bank.had_errors) ? "inconclusive"
                                                   : "fails-at-resolution";
          ojson fw = ojson::object();
          fw["radius"] = r;
          fw["target1"] = format_point(XC(net1[p1]));
          fw["target2"] = format_point(XC(net2[p2]));
          fw["reason"] = "no single member met both target disks";
          rep.witnesses = ojson::array();
          rep.witnesses.push_back(fw);
          return rep;
        }
      }
  }
  rep.verdict = heuristic ? "holds (heuristic)" : "holds-with-witness";
  if (heuristic)
    rep.notes.push_back(
        "heuristic: some witnesses rest on sampling without an "
        "argument-principle certificate");
  if (sink.suppressed)
    rep.notes.push_back(std::to_string(sink.suppressed) +
                        " further witnesses suppressed");
  rep.witnesses = std::move(sink.arr);
  return rep;
}

AnalysisReport is_expanding_at(const EnumeratedFamily& fam, const XC& z0,
                               const std::vector<Complex>& K, double k_eps,
                               const std::vector<XC>& E,
                               const std::vector<double>& radii, long Q,
                               std::uint64_t seed) {
  Complex c0 = finite_center(z0, "base point");
  check_radii(radii);
  if (K.empty()) throw Error(Errc::precondition, "K net is empty");
  if (!(k_eps > 0)) throw Error(Errc::precondition, "k_eps must be > 0");
  if (Q < 1) throw Error(Errc::precondition, "multiplicity Q must be >= 1");
  if (E.size() > 2)
    throw Error(Errc::precondition,
                "the exceptional set holds at most two points");
  for (const Complex& k : K)
    for (const XC& e : E)
      if (chordal(XC(k), e) <= k_eps)
        throw Error(Errc::precondition,
                    "K must keep chordal clearance k_eps from the "
                    "exceptional set");

  AnalysisReport rep = make_report("is_expanding_at", seed);
  rep.params["z0"] = format_point(z0);
  rep.params["radii"] = radii;
  rep.params["k_size"] = K.size();
  rep.params["k_eps"] = k_eps;
  {
    ojson e = ojson::array();
    for (const XC& x : E) e.push_back(format_point(x));
    rep.params["exceptional"] = e;
  }
  rep.params["q"] = Q;
  rep.params["budget"] = fam.size();

  bool heuristic = false;
  for (double r : radii) {
    SampleBank bank;
    bool have_bank = false;
    long found = 0;
    bool dirty = false;
    ojson labels = ojson::array();
    std::optional<Complex> first_uncovered;
    for (std::size_t i = 0; i < fam.size() && found < Q; ++i) {
      bool ok = true;
      if (fam.members[i].rational) {
        for (const Complex& w : K) {
          long c = 0;
          try {
            c = count_solutions_in(fam.members[i].expr, XC(w), c0, r);
          } catch (const Error&) {
            dirty = true;
          }
          if (c < 1) {
            ok = false;
            if (!first_uncovered) first_uncovered = w;
            break;
          }
        }
      } else {
        heuristic = true;
        if (!have_bank) {
          bank = sample_disk(fam, c0, r);
          have_bank = true;
        }
        for (const Complex& w : K) {
          bool hit = false;
          for (std::size_t s = 0; s < bank.samples.size() && !hit; ++s) {
            const EvalResult& e = bank.images[s][i];
            hit = e.ok && chordal(e.v, XC(w)) <= k_eps;
          }
          if (!hit) {
            ok = false;
            if (!first_uncovered) first_uncovered = w;
            break;
          }
        }
      }
      if (ok) {
        ++found;
        labels.push_back(fam.members[i].label);
      }
    }
    if (found < Q) {
      rep.verdict = dirty ? "inconclusive" : "fails-at-resolution";
      ojson fw = ojson::object();
      fw["radius"] = r;
      fw["covering_members"] = found;
      fw["required"] = Q;
      if (first_uncovered)
        fw["uncovered"] = format_point(XC(*first_uncovered));
      rep.witnesses.push_back(fw);
      return rep;
    }
    ojson w = ojson::object();
    w["radius"] = r;
    w["labels"] = labels;
    rep.witnesses.push_back(w);
  }
  rep.verdict = heuristic ? "holds (heuristic)" : "holds-with-witness";
  if (heuristic)
    rep.notes.push_back(
        "heuristic: sampled covering used for non-rational members");
  return rep;
}

AnalysisReport expanding_implies_transitive_check(
    const EnumeratedFamily& fam, const XC& z0, const std::vector<Complex>& K,
    double k_eps, const std::vector<XC>& E, const std::vector<double>& radii,
    long Q, const std::vector<Complex>& net, double eps, std::uint64_t seed) {
  AnalysisReport rep = make_report("expanding_implies_transitive_check", seed);
  rep.params["z0"] = format_point(z0);
  rep.params["radii"] = radii;
  rep.params["eps"] = eps;
  rep.params["q"] = Q;
  rep.params["budget"] = fam.size();

  AnalysisReport exp_rep =
      is_expanding_at(fam, z0, K, k_eps, E, radii, Q, seed);
  rep.params["expanding_verdict"] = exp_rep.verdict;
  if (!verdict_holds(exp_rep.verdict)) {
    rep.verdict = "precondition-not-met";
    rep.notes.push_back("expanding did not hold at this resolution; the "
                        "implication makes no claim");
    return rep;
  }

  std::vector<Complex> cleared;
  for (const Complex& w : net) {
    bool ok = true;
    for (const XC& e : E) ok = ok && chordal(XC(w), e) > k_eps;
    if (ok) cleared.push_back(w);
  }
  if (cleared.empty())
    throw Error(Errc::precondition,
                "every codomain net point fell inside an exceptional "
                "neighborhood");
  rep.params["net_size"] = cleared.size();

  AnalysisReport tr =
      is_transitive_at(fam, z0, radii, cleared, eps, std::nullopt, seed);
  rep.params["transitive_verdict"] = tr.verdict;
  if (verdict_holds(tr.verdict)) {
    rep.verdict = "implication-confirmed";
  } else {
    rep.verdict = "violated";
    rep.witnesses = tr.witnesses;
    rep.notes.push_back(
        "expanding held but transitivity failed on the cleared net — this "
        "contradicts the implication and indicates an implementation bug");
  }
  return rep;
}

WitnessSearch compact_transitive_witness(const EnumeratedFamily& fam,
                                         const XC& z0, const Complex& u_center,
                                         double u_radius,
                                         const Complex& v_center,
                                         double v_radius, double eps) {
  Complex c0 = finite_center(z0, "z0");
  if (std::abs(c0 - u_center) > u_radius)
    throw Error(Errc::precondition, "z0 must lie in U");
  WitnessSearch out;
  std::vector<EvalResult> vals = fam.eval_all(z0);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!vals[i].ok) continue;
    double d = chordal(vals[i].v, XC(v_center));
    if (d <= v_radius + eps) {
      out.found = true;
      out.label = fam.members[i].label;
      out.value = vals[i].v;
      out.dist = d;
      return out;
    }
  }
  return out;
}

AnalysisReport transitivity_transfer_check(
    const EnumeratedFamily& F, const EnumeratedFamily& G,
    const std::string& mode, const XC& z0, double pair_eps,
    const std::vector<double>& radii, const std::vector<Complex>& net,
    double eps, std::uint64_t seed) {
  if (mode != "agreement" && mode != "proximity")
    throw Error(Errc::usage, "mode must be 'agreement' or 'proximity'");
  AnalysisReport rep = make_report("transitivity_transfer_check", seed);
  rep.params["mode"] = mode;
  rep.params["z0"] = format_point(z0);
  if (mode == "proximity") rep.params["pair_eps"] = pair_eps;
  rep.params["radii"] = radii;
  rep.params["eps"] = eps;
  rep.params["budget_f"] = F.size();
  rep.params["budget_g"] = G.size();

  // pairing table: first G member matching each F member
  std::vector<std::vector<EvalResult>> fprobe, gprobe;
  std::vector<Complex> probes;
  if (mode == "agreement") {
    probes.push_back(finite_center(z0, "z0"));
  } else {
    probes = probe_points();
  }
  fprobe.resize(probes.size());
  gprobe.resize(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    F.eval_all(XC(probes[p]), fprobe[p]);
    G.eval_all(XC(probes[p]), gprobe[p]);
  }
  double bound = mode == "agreement" ? 1e-9 : pair_eps;

  WitnessSink pairs;
  for (std::size_t i = 0; i < F.size(); ++i) {
    int match = -1;
    double best = 0;
    for (std::size_t j = 0; j < G.size() && match < 0; ++j) {
      double sup = 0;
      bool any = false, ok = true;
      for (std::size_t p = 0; p < probes.size(); ++p) {
        const EvalResult& a = fprobe[p][i];
        const EvalResult& b = gprobe[p][j];
        if (!a.ok || !b.ok) {
          if (a.ok != b.ok) ok = false;
          continue;
        }
        any = true;
        sup = std::max(sup, chordal(a.v, b.v));
        if (sup > bound) {
          ok = false;
          break;
        }
      }
      if (ok && any && sup <= bound) {
        match = static_cast<int>(j);
        best = sup;
      }
    }
    if (match < 0) {
      rep.verdict = "pairing-failed";
      ojson fw = ojson::object();
      fw["f"] = F.members[i].label;
      fw["reason"] = mode == "agreement"
                         ? "no member of the second family agrees at z0"
                         : "no member of the second family stays within "
                           "pair_eps on the probe grid";
      rep.witnesses.push_back(fw);
      return rep;
    }
    ojson w = ojson::object();
    w["f"] = F.members[i].label;
    w["g"] = G.members[match].label;
    w["dist"] = best;
    pairs.push(std::move(w));
  }

  AnalysisReport f_rep =
      is_transitive_at(F, z0, radii, net, eps, std::nullopt, seed);
  rep.params["f_verdict"] = f_rep.verdict;
  if (!verdict_holds(f_rep.verdict)) {
    rep.verdict = "precondition-not-met";
    rep.notes.push_back(
        "the first family is not transitive at this resolution; no claim");
    rep.witnesses = std::move(pairs.arr);
    return rep;
  }
  AnalysisReport g_rep =
      is_transitive_at(G, z0, radii, net, eps, std::nullopt, seed);
  rep.params["g_verdict"] = g_rep.verdict;
  if (verdict_holds(g_rep.verdict)) {
    rep.verdict = "transfer-confirmed";
  } else {
    rep.verdict = "violated";
    rep.witnesses = g_rep.witnesses;
    rep.notes.push_back(
        "the paired family failed transitivity at the same resolution — "
        "this contradicts the transfer and indicates an implementation bug");
    return rep;
  }
  if (pairs.suppressed)
    rep.notes.push_back(std::to_string(pairs.suppressed) +
                        " further pairings suppressed");
  rep.witnesses = std::move(pairs.arr);
  return rep;
}

ClosureResult closure_contains(const EnumeratedFamily& fam, const Expr& target,
                               const PointSet& samples, double eps) {
  if (samples.size() == 0)
    throw Error(Errc::precondition, "closure check needs sample points");
  if (!(eps > 0)) throw Error(Errc::precondition, "eps must be > 0");
  Expr bound = bind_symbols(target, Bindings{});

  std::vector<XC> tvals;
  for (const auto& e : samples.entries()) {
    try {
      tvals.push_back(eval_at(bound, e.z));
    } catch (const Error& err) {
      throw Error(Errc::precondition, "target undefined at sample " +
                                          format_point(e.z) + " (" +
                                          errc_name(err.code) + ")");
    }
  }
  std::vector<std::vector<EvalResult>> vals(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s)
    fam.eval_all(samples.entries()[s].z, vals[s]);

  ClosureResult out;
  out.sup = 4.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    double sup = 0;
    bool ok = true;
    for (std::size_t s = 0; s < samples.size() && ok; ++s) {
      const EvalResult& v = vals[s][i];
      if (!v.ok) {
        ok = false;
        break;
      }
      sup = std::max(sup, chordal(v.v, tvals[s]));
    }
    if (!ok) continue;
    if (sup < out.sup) out.sup = sup;
    if (sup <= eps) {
      out.contained = true;
      out.label = fam.members[i].label;
      out.sup = sup;
      return out;
    }
  }
  return out;
}

bool revalidate_witnesses(const EnumeratedFamily& fam,
                          const AnalysisReport& report) {
  std::map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < fam.size(); ++i)
    by_label[fam.members[i].label] = i;

  double eps = report.params.contains("eps")
                   ? report.params["eps"].get<double>()
                   : 0.0;
  std::string z0s = report.params.contains("z0")
                        ? report.params["z0"].get<std::string>()
                        : std::string();

  WindingOptions strict;
  strict.start_samples = 128;

  for (const auto& w : report.witnesses) {
    if (!w.is_object() || !w.contains("label")) continue;  // summaries
    auto it = by_label.find(w["label"].get<std::string>());
    if (it == by_label.end()) return false;
    const Expr& f = fam.members[it->second].expr;

    XC target = w.contains("target")
                    ? parse_point(w["target"].get<std::string>())
                    : XC();
    double radius = w.contains("radius") ? w["radius"].get<double>() : 0.0;
    Complex base;
    if (w.contains("base"))
      base = parse_point(w["base"].get<std::string>()).value();
    else if (!z0s.empty())
      base = parse_point(z0s).value();
    else
      return false;

    std::string method =
        w.contains("method") ? w["method"].get<std::string>() : "sample";
    try {
      if (method == "winding-sweep") {
        if (count_solutions_in(f, target, base, radius, strict) < 1)
          return false;
        continue;
      }
      if (!w.contains("sample") || !w.contains("image")) return false;
      XC s = parse_point(w["sample"].get<std::string>());
      XC stored = parse_point(w["image"].get<std::string>());
      XC v = eval_at(f, s);
      if (chordal(v, stored) > 1e-9) return false;
      if (w.contains("target") && eps > 0 && chordal(v, target) > eps)
        return false;
      if (method == "winding" && radius > 0)
        if (count_solutions_in(f, v, base, radius, strict) < 1) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace famdyn
