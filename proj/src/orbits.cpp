#include "famdyn/orbits.hpp"

#include <algorithm>
#include <cmath>

#include "famdyn/parallel.hpp"
#include "famdyn/solve.hpp"
#include "json.hpp"

namespace famdyn {

PointSet orbit_set(const EnumeratedFamily& fam, const XC& z0) {
  std::vector<EvalResult> vals = fam.eval_all(z0);
  PointSet out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!vals[i].ok)
      throw Error(vals[i].err, "orbit: member '" + fam.members[i].label +
                                   "' failed: " + errc_name(vals[i].err));
    out.add(vals[i].v, fam.members[i].label);
  }
  return out;
}

PointSet omega_limit(const EnumeratedFamily& fam, const XC& z0,
                     double cluster_eps) {
  if (fam.size() < 16)
    throw Error(Errc::precondition, "omega_limit needs a budget of at least 16");
  if (!(cluster_eps > 0))
    throw Error(Errc::precondition, "cluster_eps must be > 0");

  std::vector<EvalResult> vals = fam.eval_all(z0);
  std::vector<XC> tail;
  for (std::size_t i = vals.size() / 2; i < vals.size(); ++i)
    if (vals[i].ok) tail.push_back(vals[i].v);

  std::sort(tail.begin(), tail.end(), [](const XC& a, const XC& b) {
    if (a.is_inf() != b.is_inf()) return b.is_inf();
    if (a.is_inf()) return false;
    if (a.value().real() != b.value().real())
      return a.value().real() < b.value().real();
    return a.value().imag() < b.value().imag();
  });

  struct Cluster {
    XC leader;
    std::vector<XC> pts;
  };
  std::vector<Cluster> clusters;
  for (const XC& p : tail) {
    bool joined = false;
    for (Cluster& c : clusters)
      if (chordal(p, c.leader) <= cluster_eps) {
        c.pts.push_back(p);
        joined = true;
        break;
      }
    if (!joined) clusters.push_back(Cluster{p, {p}});
  }

  // transient suppression: sub-3 clusters hand their points to the nearest
  // qualified cluster when one sits within 2*cluster_eps
  std::vector<Cluster*> big;
  for (Cluster& c : clusters)
    if (c.pts.size() >= 3) big.push_back(&c);
  for (Cluster& c : clusters) {
    if (c.pts.size() >= 3) continue;
    for (const XC& p : c.pts) {
      Cluster* best = nullptr;
      double bd = 2 * cluster_eps;
      for (Cluster* b : big) {
        double d = chordal(p, b->leader);
        if (d <= bd) {
          best = b;
          bd = d;
        }
      }
      if (best) best->pts.push_back(p);
    }
  }

  PointSet out;
  long k = 0;
  for (Cluster* c : big) {
    bool inf = c->leader.is_inf();
    XC centroid;
    if (inf) {
      centroid = XC::infinity();
    } else {
      Complex sum(0, 0);
      for (const XC& p : c->pts) sum += p.value();
      centroid = XC(sum / static_cast<double>(c->pts.size()));
    }
    out.add(centroid, "w" + std::to_string(k++));
  }
  out.sort_canonical();
  return out;
}

static double dist_to_set(const XC& z, const PointSet& S) {
  double best = 4.0;
  for (const auto& e : S.entries()) best = std::min(best, chordal(z, e.z));
  return best;
}

InvarianceResult is_forward_invariant(const EnumeratedFamily& fam,
                                      const PointSet& S, double tol) {
  if (S.size() == 0)
    throw Error(Errc::precondition, "invariance check needs a nonempty set");
  InvarianceResult out;
  for (const auto& e : S.entries()) {
    std::vector<EvalResult> vals = fam.eval_all(e.z);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i].ok) {
        out.invariant = false;
        out.witnesses.push_back(
            InvarianceWitness{fam.members[i].label, e.z, XC(), vals[i].err});
        out.notes.push_back("member '" + fam.members[i].label +
                            "' failed to evaluate: " +
                            errc_name(vals[i].err));
        return out;
      }
      if (dist_to_set(vals[i].v, S) > tol) {
        out.invariant = false;
        out.witnesses.push_back(
            InvarianceWitness{fam.members[i].label, e.z, vals[i].v});
        return out;
      }
    }
  }
  return out;
}

InvarianceResult is_backward_invariant(const EnumeratedFamily& fam,
                                       const PointSet& S, double tol,
                                       std::uint64_t seed) {
  if (S.size() == 0)
    throw Error(Errc::precondition, "invariance check needs a nonempty set");
  for (const Member& m : fam.members)
    if (!m.rational)
      throw Error(Errc::not_rational,
                  "backward invariance needs rational members ('" + m.label +
                      "' is not)");
  InvarianceResult out;
  for (const auto& e : S.entries()) {
    for (const Member& m : fam.members) {
      std::vector<Preimage> pre = preimages(m.expr, e.z, seed);
      for (const Preimage& q : pre)
        if (dist_to_set(q.z, S) > tol) {
          out.invariant = false;
          out.witnesses.push_back(InvarianceWitness{m.label, e.z, q.z});
          return out;
        }
    }
  }
  return out;
}

NonwanderingResult is_nonwandering(const EnumeratedFamily& fam, const XC& z0,
                                   const std::vector<double>& radii,
                                   bool certify, std::uint64_t seed) {
  if (z0.is_inf())
    throw Error(Errc::precondition, "nonwandering center must be finite");
  if (radii.empty())
    throw Error(Errc::precondition, "radii list must be nonempty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0))
      throw Error(Errc::precondition, "radii must be positive");
    if (i && !(radii[i] < radii[i - 1]))
      throw Error(Errc::precondition, "radii must be strictly decreasing");
  }
  (void)seed;

  NonwanderingResult out;
  bool heuristic_noted = false;
  for (double r : radii) {
    Region disk;
    disk.kind = Region::Kind::disk;
    disk.center = z0.value();
    disk.r1 = r;
    std::vector<Complex> samples = make_net(disk, r / 4);
    samples.insert(samples.begin(), z0.value());

    std::vector<std::vector<EvalResult>> vals(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s)
      fam.eval_all(XC(samples[s]), vals[s]);

    bool found = false;
    bool dirty = false;
    for (std::size_t i = 0; i < fam.size() && !found; ++i) {
      for (std::size_t s = 0; s < samples.size() && !found; ++s) {
        const EvalResult& v = vals[s][i];
        if (!v.ok) {
          dirty = true;
          continue;
        }
        if (v.v.is_inf() || !disk.contains(v.v.value())) continue;
        NonwanderingWitness w;
        w.radius = r;
        w.label = fam.members[i].label;
        w.z = XC(samples[s]);
        w.image = v.v;
        w.method = "sample";
        if (certify && fam.members[i].rational) {
          try {
            long c = count_solutions_in(fam.members[i].expr, v.v,
                                        disk.center, r);
            if (c > 0) {
              w.method = "winding";
              w.count = c;
            } else {
              out.notes.push_back(
                  "winding recount missed a sampled hit at radius " +
                  format_double(r) + "; sample witness retained");
            }
          } catch (const Error& e) {
            out.notes.push_back("winding certificate failed (" +
                                std::string(errc_name(e.code)) +
                                ") at radius " + format_double(r) +
                                "; sample witness retained");
          }
        } else if (!fam.members[i].rational && !heuristic_noted) {
          out.notes.push_back(
              "heuristic: sampled certificate for non-rational member");
          heuristic_noted = true;
        }
        out.witnesses.push_back(w);
        found = true;
      }
    }

    if (!found && certify) {
      // sampling missed: sweep disk-net targets with the argument principle
      bool all_rational = true;
      for (const Member& m : fam.members) all_rational = all_rational && m.rational;
      if (all_rational) {
        for (std::size_t i = 0; i < fam.size() && !found; ++i) {
          for (std::size_t s = 1; s < samples.size() && !found; ++s) {
            try {
              long c = count_solutions_in(fam.members[i].expr,
                                          XC(samples[s]), disk.center, r);
              if (c > 0) {
                NonwanderingWitness w;
                w.radius = r;
                w.label = fam.members[i].label;
                w.z = XC(samples[s]);
                w.image = XC(samples[s]);
                w.count = c;
                w.method = "winding";
                out.witnesses.push_back(w);
                out.notes.push_back(
                    "no sampled hit at radius " + format_double(r) +
                    "; winding located an intersection");
                found = true;
              }
            } catch (const Error&) {
              dirty = true;
            }
          }
        }
      }
    }

    if (!found) {
      out.failed_radius = r;
      out.verdict = dirty ? "inconclusive" : "wandering-at-resolution";
      out.notes.push_back("no intersection found at radius " +
                          format_double(r) + " within budget " +
                          std::to_string(fam.size()));
      return out;
    }
  }
  out.verdict = "nonwandering";
  return out;
}

long CellSetResult::marked_count() const {
  long n = 0;
  for (std::uint8_t m : marks) n += m ? 1 : 0;
  return n;
}

Raster CellSetResult::raster() const {
  if (grid.region.kind == Region::Kind::circle) {
    Raster r(grid.nx, 1, 0, 0, grid.eps);
    for (std::size_t k = 0; k < grid.cells.size(); ++k)
      if (marks[k]) r.marks[r.idx(grid.cells[k].i, 0)] = 1;
    return r;
  }
  Raster r(grid.nx, grid.ny, grid.ox, grid.oy, grid.eps);
  for (std::size_t k = 0; k < grid.cells.size(); ++k)
    if (marks[k]) r.marks[r.idx(grid.cells[k].i, grid.cells[k].j)] = 1;
  return r;
}

std::string CellSetResult::sidecar_json() const {
  nlohmann::ordered_json j;
  j["region"] = grid.region.str();
  j["eps"] = grid.eps;
  j["marked_count"] = marked_count();
  auto cells = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < grid.cells.size(); ++k)
    if (marks[k]) cells.push_back(format_point(XC(grid.cells[k].center)));
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

CellSetResult nonwandering_set(const EnumeratedFamily& fam, const Region& r,
                               double eps, bool certify, std::uint64_t seed) {
  CellSetResult out;
  out.grid = make_grid(r, eps);
  out.marks.assign(out.grid.cells.size(), 0);
  std::vector<std::uint8_t> inconclusive(out.grid.cells.size(), 0);
  parallel_for(out.grid.cells.size(), [&](std::size_t k) {
    NonwanderingResult nr = is_nonwandering(
        fam, XC(out.grid.cells[k].center), {eps}, certify, seed);
    out.marks[k] = nr.verdict == "nonwandering" ? 1 : 0;
    inconclusive[k] = nr.verdict == "inconclusive" ? 1 : 0;
  });
  long n_inc = 0;
  for (std::uint8_t b : inconclusive) n_inc += b;
  if (n_inc)
    out.notes.push_back(std::to_string(n_inc) +
                        " cells inconclusive (left unmarked)");
  return out;
}

CellSetResult universal_points(const EnumeratedFamily& fam,
                               const Region& domain, double domain_eps,
                               const std::vector<Complex>& target,
                               double eps) {
  if (target.empty())
    throw Error(Errc::precondition, "universal_points needs a nonempty target");
  CellSetResult out;
  out.grid = make_grid(domain, domain_eps);
  out.marks.assign(out.grid.cells.size(), 0);
  parallel_for(out.grid.cells.size(), [&](std::size_t k) {
    std::vector<EvalResult> vals = fam.eval_all(XC(out.grid.cells[k].center));
    for (const Complex& t : target) {
      bool hit = false;
      for (const EvalResult& v : vals)
        if (v.ok && chordal(v.v, XC(t)) <= eps) {
          hit = true;
          break;
        }
      if (!hit) return;
    }
    out.marks[k] = 1;
  });
  return out;
}

CellSetResult forward_invariant_hull(const EnumeratedFamily& fam,
                                     const std::vector<Complex>& seeds,
                                     const Region& r, double eps) {
  if (seeds.empty())
    throw Error(Errc::precondition, "hull needs at least one seed");
  CellSetResult out;
  out.grid = make_grid(r, eps);
  out.marks.assign(out.grid.cells.size(), 0);
  std::vector<std::size_t> queue;
  for (const Complex& s : seeds) {
    auto ci = out.grid.cell_index(s);
    if (!ci)
      throw Error(Errc::precondition,
                  "seed " + format_point(XC(s)) + " is outside the region grid");
    if (!out.marks[*ci]) {
      out.marks[*ci] = 1;
      queue.push_back(*ci);
    }
  }

  bool sliver_noted = false, error_noted = false;
  const bool circ = r.kind == Region::Kind::circle;
  double arc = circ ? 2 * 3.14159265358979323846 / out.grid.nx : 0;
  std::vector<EvalResult> vals;
  while (!queue.empty()) {
    std::size_t k = queue.back();
    queue.pop_back();
    Complex c = out.grid.cells[k].center;
    std::vector<Complex> stencil{c};
    if (circ) {
      for (double d : {-0.35, 0.35}) {
        Complex rot = std::polar(1.0, d * arc);
        stencil.push_back(r.center + (c - r.center) * rot);
      }
    } else {
      for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0})
          stencil.push_back(c + Complex(sx * 0.35 * eps, sy * 0.35 * eps));
    }
    for (const Complex& s : stencil) {
      fam.eval_all(XC(s), vals);
      for (const EvalResult& v : vals) {
        if (!v.ok) {
          if (!error_noted) {
            out.notes.push_back("some member evaluations failed during hull "
                                "growth");
            error_noted = true;
          }
          continue;
        }
        if (v.v.is_inf() || !r.contains(v.v.value(), circ ? eps / 2 : 0.0)) {
          out.escaped = true;
          continue;
        }
        auto ci = out.grid.cell_index(v.v.value());
        if (!ci) {
          if (!sliver_noted) {
            out.notes.push_back(
                "an in-region image fell outside the cell grid (boundary "
                "sliver)");
            sliver_noted = true;
          }
          continue;
        }
        if (!out.marks[*ci]) {
          out.marks[*ci] = 1;
          queue.push_back(*ci);
        }
      }
    }
  }
  out.proper = out.marked_count() < static_cast<long>(out.grid.cells.size());
  if (out.escaped)
    out.notes.push_back("saturation: some images escaped the region");
  return out;
}

std::vector<std::size_t> grid_closure_violations(
    const Grid& g, const std::vector<std::uint8_t>& marks) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < g.cells.size(); ++k) {
    if (marks[k]) continue;
    std::vector<std::size_t> nb = g.neighbors(k);
    if (nb.empty()) continue;
    bool all = true;
    for (std::size_t n : nb) all = all && marks[n];
    if (all) out.push_back(k);
  }
  return out;
}

}  // namespace famdyn
