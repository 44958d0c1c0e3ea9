#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "famdyn/family.hpp"
#include "famdyn/normality.hpp"
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

}  // namespace

TEST_CASE("marty profile of the dilation family grows linearly") {
  // sup of |n| / (1 + |nz|^2) over a small disk at 0 is n itself
  EnumeratedFamily lin = fam_of("ntimesz.json", 64);
  MartyProfile mp = marty_profile(lin, XC(0, 0), 0.1);
  CHECK(mp.usable == 64);
  CHECK(mp.max_sup == doctest::Approx(64.0).epsilon(0.01));
  CHECK(mp.slope == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(mp.sups.size() == 64);
  CHECK(mp.sups[0].label == "n=1");
  CHECK(mp.sups[0].sup == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("marty profile of the power family stays bounded at the center") {
  EnumeratedFamily pw = fam_of("powers.json", 64);
  MartyProfile mp = marty_profile(pw, XC(0, 0), 0.5);
  CHECK(mp.max_sup > 0.9);
  CHECK(mp.max_sup < 1.1);
  CHECK(mp.slope < 0.05);
}

TEST_CASE("normality verdicts at the three anchors") {
  // constants are as normal as it gets
  FamilySpec cspec = family_from_json_text(
      R"({"name":"const","kind":"list","members":["0.5","0.5+0.1*i","0.4"]})");
  EnumeratedFamily cf = enumerate_family(cspec, 8);
  AnalysisReport cn = is_normal_at(cf, XC(0, 0), {0.5}, 100.0, 41, 0);
  CHECK(cn.verdict == "normal-evidence");

  // z^n inside the unit disk: derivative sups collapse with the radius
  EnumeratedFamily pw = fam_of("powers.json", 512);
  AnalysisReport nin = is_normal_at(pw, XC(0, 0), {0.5}, 100.0, 41, 0);
  CHECK(nin.verdict == "normal-evidence");

  // z^n on the unit circle: the center sample alone gives n/2
  AnalysisReport non = is_normal_at(pw, XC(1, 0), {0.2}, 100.0, 41, 0);
  CHECK(non.verdict == "non-normal");
  CHECK(non.params["mode"] == "meromorphic-chordal");
}

TEST_CASE("fatou julia raster on a tiny budget") {
  EnumeratedFamily sq = fam_of("sq.json", 12);
  FatouJulia fj = fatou_julia(sq, Region::parse("rect:-1.5,-1.5,1.5,1.5"), 16,
                              100.0, 0);
  CHECK(fj.grid.cells.size() == 256);
  long jc = fj.julia_count();
  CHECK(jc > 0);
  CHECK(jc < 256);  // both verdicts appear
  Raster r = fj.raster();
  CHECK(r.nx == 16);
  CHECK(r.ny == 16);
  std::string meta = fj.sidecar_json(12, 100.0);
  CHECK(meta.find("\"budget\"") != std::string::npos);

  // the window must be rectangular and at least 16 pixels across
  CHECK_THROWS_AS(fatou_julia(sq, Region::parse("disk:0,0,1"), 16, 100.0, 0),
                  Error);
  CHECK_THROWS_AS(
      fatou_julia(sq, Region::parse("rect:-1,-1,1,1"), 8, 100.0, 0), Error);
}

TEST_CASE("omitted value cells are certified, not sampled") {
  EnumeratedFamily pw = fam_of("powers.json", 16);
  Region domain = Region::parse("disk:0,0,0.9");
  Region codomain = Region::parse("rect:-2,-2,2,2");
  // domain_eps 0.1 keeps every net point inside the unit disk (boundary
  // cells may poke out by eps/sqrt(2), so 0.4 would leak past |z| = 1 and
  // low powers of those points would splash into the band)
  CellSetResult cs = omitted_values(pw, domain, 0.1, codomain, 0.5, 0);
  REQUIRE(cs.grid.cells.size() == 64);
  long omitted = 0;
  for (std::size_t k = 0; k < cs.grid.cells.size(); ++k) {
    const Complex c = cs.grid.cells[k].center;
    double corner = 0.5 / 2;
    double minmod = std::max(
        0.0, std::abs(c) - corner * std::sqrt(2.0));  // over the whole cell
    if (minmod > 1.0) {
      ++omitted;
      CHECK(cs.marks[k] == 0);  // |z^n| < 1 on the whole net
    }
  }
  CHECK(omitted > 0);
  // the cell holding the origin is hit (f(0) = 0)
  auto zero = cs.grid.cell_index(Complex(0, 0));
  REQUIRE(zero.has_value());
  CHECK(cs.marks[*zero] == 1);
}

TEST_CASE("montel consistency across the three verdict routes") {
  // omitted-values hypothesis: powers on the 0.9 disk omit |w| > 1
  EnumeratedFamily pw = fam_of("powers.json", 64);
  AnalysisReport omit = montel_consistency(
      pw, Region::parse("disk:0,0,0.9"), 0.4, Region::parse("rect:-2,-2,2,2"),
      0.25, 100.0, 100.0, 0);
  CHECK(omit.verdict == "consistent");

  // bounded-route hypothesis: rotations have unit modulus everywhere
  EnumeratedFamily rot = fam_of("rotations.json", 64);
  AnalysisReport bounded = montel_consistency(
      rot, Region::parse("circle:0,0,1"), 0.2, Region::parse("rect:-2,-2,2,2"),
      0.25, 100.0, 100.0, 0);
  CHECK(bounded.verdict == "consistent");

  // dilations: every codomain cell is certified hit and n z grows without
  // bound, so neither hypothesis applies
  EnumeratedFamily lin = fam_of("ntimesz.json", 64);
  AnalysisReport neither = montel_consistency(
      lin, Region::parse("disk:0,0,1"), 0.35, Region::parse("rect:-2,-2,2,2"),
      0.5, 100.0, 100.0, 0);
  CHECK(neither.verdict == "precondition-not-met");
}

TEST_CASE("equivalence cross-check verdicts") {
  // non-normal at 1 and weakly mixing there: z^n with windows inside/outside
  EnumeratedFamily pw = fam_of("powers.json", 512);
  AnalysisReport agree = weakly_mixing_equivalence_check(
      pw, XC(1, 0), {0.2}, 100.0, {0.25}, {Complex(0.5, 0)}, {Complex(2, 0)},
      0.1, 0);
  CHECK(agree.verdict == "agree");
  CHECK(agree.params["normal_verdict"] == "non-normal");
  CHECK(agree.params["mixing_verdict"] == "holds-with-witness");

  // normal at the origin and not mixing there
  AnalysisReport agree0 = weakly_mixing_equivalence_check(
      pw, XC(0, 0), {0.5}, 100.0, {0.2}, {Complex(0.3, 0)}, {Complex(-0.3, 0)},
      0.1, 0);
  CHECK(agree0.verdict == "agree");
  CHECK(agree0.params["normal_verdict"] == "normal-evidence");
}

TEST_CASE("normal disk diagnostic finds calm territory") {
  EnumeratedFamily pw = fam_of("powers.json", 64);
  auto calm = find_normal_disk(pw, Region::parse("disk:0,0,0.5"), 0.25, 100.0);
  CHECK(calm.has_value());
}
