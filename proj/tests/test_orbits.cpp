#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "famdyn/family.hpp"
#include "famdyn/orbits.hpp"
#include "famdyn/region.hpp"
#include "famdyn/sphere.hpp"

using namespace famdyn;

namespace {

std::string corpus(const char* leaf) {
  return std::string(FAMDYN_CORPUS_DIR) + "/" + leaf;
}

EnumeratedFamily fam_of(const char* leaf, long budget) {
  return enumerate_family(load_family_file(corpus(leaf)), budget);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("orbit of a point keeps member labels") {
  EnumeratedFamily fam = fam_of("powers.json", 6);
  PointSet orb = orbit_set(fam, XC(2, 0));
  CHECK(orb.size() == 6);  // 2, 4, ..., 64 are all distinct
  CHECK(orb.entries()[0].label == "n=1");
  CHECK(chordal(orb.entries()[5].z, XC(64, 0)) < 1e-12);
}

TEST_CASE("omega limit of a convergent orbit is its limit point") {
  EnumeratedFamily fam = fam_of("powersplus1.json", 128);
  PointSet om = omega_limit(fam, XC(0.5, 0), 1e-6);
  REQUIRE(om.size() == 1);
  CHECK(chordal(om.entries()[0].z, XC(1, 0)) <= 1e-9);

  // superattracting cycle: z^2 - 1 from 0.25 settles on {0, -1}
  EnumeratedFamily bas = fam_of("basilica.json", 16);
  PointSet cyc = omega_limit(bas, XC(0.25, 0), 1e-6);
  REQUIRE(cyc.size() == 2);
  double d0 = std::min(chordal(cyc.entries()[0].z, XC(0, 0)),
                       chordal(cyc.entries()[0].z, XC(-1, 0)));
  double d1 = std::min(chordal(cyc.entries()[1].z, XC(0, 0)),
                       chordal(cyc.entries()[1].z, XC(-1, 0)));
  CHECK(d0 <= 1e-9);
  CHECK(d1 <= 1e-9);
}

TEST_CASE("omega limit needs a real tail") {
  EnumeratedFamily tiny = fam_of("powers.json", 8);
  CHECK_THROWS_AS(omega_limit(tiny, XC(0.5, 0), 1e-6), Error);
}

TEST_CASE("omega limit of an irrational rotation fills the circle") {
  EnumeratedFamily rot = fam_of("rotations.json", 512);
  PointSet om = omega_limit(rot, XC(1, 0), 0.05);
  REQUIRE(om.size() >= 3);
  std::vector<double> args;
  for (const auto& e : om.entries()) {
    REQUIRE_FALSE(e.z.is_inf());
    CHECK(std::abs(std::abs(e.z.value()) - 1.0) <= 0.1);
    args.push_back(std::arg(e.z.value()));
  }
  std::sort(args.begin(), args.end());
  double maxgap = 2 * kPi - (args.back() - args.front());
  for (std::size_t i = 1; i < args.size(); ++i)
    maxgap = std::max(maxgap, args[i] - args[i - 1]);
  CHECK(maxgap <= 0.15);
}

TEST_CASE("omega limit reports nothing below cluster mass") {
  // 324 distinct translates, pairwise farther apart than the cluster radius
  EnumeratedFamily tr = fam_of("translations.json", 512);
  PointSet om = omega_limit(tr, XC(0, 0), 0.05);
  CHECK(om.size() == 0);
}

TEST_CASE("forward invariance witnesses the first escape") {
  EnumeratedFamily fam = fam_of("powersplus1.json", 16);
  PointSet S;
  S.add(XC(1, 0), "one");
  InvarianceResult res = is_forward_invariant(fam, S, 1e-6);
  CHECK_FALSE(res.invariant);
  REQUIRE(res.witnesses.size() == 1);
  CHECK(res.witnesses[0].label == "n=1");
  CHECK(chordal(res.witnesses[0].image, XC(2, 0)) < 1e-12);

  EnumeratedFamily lin = fam_of("ntimesz.json", 16);
  PointSet T;
  T.add(XC(0, 0), "zero");
  T.add(XC::infinity(), "inf");
  CHECK(is_forward_invariant(lin, T, 1e-9).invariant);
}

TEST_CASE("backward invariance solves for preimages") {
  EnumeratedFamily fam = fam_of("powers.json", 8);
  PointSet S;
  S.add(XC(0, 0), "zero");
  S.add(XC::infinity(), "inf");
  CHECK(is_backward_invariant(fam, S, 1e-9, 0).invariant);

  // {1} is forward invariant under z^n but not backward: (-1)^2 = 1
  PointSet one;
  one.add(XC(1, 0), "one");
  InvarianceResult res = is_backward_invariant(fam, one, 1e-9, 0);
  CHECK_FALSE(res.invariant);
}

TEST_CASE("nonwandering verdicts at shrinking radii") {
  FamilySpec spec = family_from_json_text(
      R"({"name":"pw2","kind":"sequence","expr":"z^n","index_start":2})");
  EnumeratedFamily fam = enumerate_family(spec, 16);
  NonwanderingResult res =
      is_nonwandering(fam, XC(0.5, 0), {0.2, 0.1, 0.05}, true, 0);
  CHECK(res.verdict == "wandering-at-resolution");
  CHECK(res.failed_radius == 0.1);
  REQUIRE(res.witnesses.size() == 1);
  CHECK(res.witnesses[0].radius == 0.2);
  CHECK(res.witnesses[0].label == "n=2");
  CHECK(res.witnesses[0].method == "winding");
  CHECK(res.witnesses[0].count >= 1);

  // a fixed point is nonwandering at every radius
  EnumeratedFamily sq = fam_of("sq.json", 8);
  NonwanderingResult fix = is_nonwandering(sq, XC(0, 0), {0.2, 0.1}, true, 0);
  CHECK(fix.verdict == "nonwandering");
  CHECK(fix.witnesses.size() == 2);
}

TEST_CASE("universal point cells for the translation lattice") {
  EnumeratedFamily tr = fam_of("translations.json", 512);
  Region domain = Region::parse("rect:-0.1,-0.1,0.1,0.1");
  std::vector<Complex> targets = {Complex(0.25, 0.25), Complex(0.25, -0.25),
                                  Complex(-0.25, 0.25), Complex(-0.25, -0.25)};
  CellSetResult loose = universal_points(tr, domain, 0.1, targets, 0.15);
  CHECK(loose.grid.cells.size() == 4);
  CHECK(loose.marked_count() == 4);

  CellSetResult tight = universal_points(tr, domain, 0.1, targets, 0.01);
  CHECK(tight.marked_count() == 0);
}

TEST_CASE("forward invariant hull saturates or escapes") {
  EnumeratedFamily pw = fam_of("powers.json", 8);
  CellSetResult hull = forward_invariant_hull(
      pw, {Complex(0.5, 0)}, Region::parse("disk:0,0,1"), 0.25);
  CHECK_FALSE(hull.escaped);
  CHECK(hull.proper);
  CHECK(hull.marked_count() >= 2);

  EnumeratedFamily lin = fam_of("ntimesz.json", 8);
  CellSetResult esc = forward_invariant_hull(
      lin, {Complex(0.5, 0)}, Region::parse("disk:0,0,2"), 0.25);
  CHECK(esc.escaped);
}

TEST_CASE("grid closure violations flag interior holes") {
  Grid g = make_grid(Region::parse("rect:-1,-1,1,1"), 0.5);
  std::vector<std::uint8_t> marks(g.cells.size(), 1);
  CHECK(grid_closure_violations(g, marks).empty());

  auto hole = g.cell_index(Complex(0.25, 0.25));
  REQUIRE(hole.has_value());
  marks[*hole] = 0;
  auto viol = grid_closure_violations(g, marks);
  REQUIRE(viol.size() == 1);
  CHECK(viol[0] == *hole);

  // an unmarked band is not a violation: it has unmarked neighbors
  marks.assign(g.cells.size(), 1);
  for (std::size_t k = 0; k < g.cells.size(); ++k)
    if (g.cells[k].center.real() > 0) marks[k] = 0;
  CHECK(grid_closure_violations(g, marks).empty());
}
