#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "famdyn/family.hpp"
#include "famdyn/sphere.hpp"

using namespace famdyn;

namespace {
std::string corpus(const char* leaf) {
  return std::string(FAMDYN_CORPUS_DIR) + "/" + leaf;
}
}  // namespace

TEST_CASE("sequence enumeration order and labels") {
  EnumeratedFamily fam =
      enumerate_family(load_family_file(corpus("powers.json")), 8);
  REQUIRE(fam.size() == 8);
  CHECK(fam.members[0].label == "n=1");
  CHECK(fam.members[7].label == "n=8");
  for (const Member& m : fam.members) {
    CHECK(m.rational);
    CHECK(m.duplicate_of == -1);
  }
  // f_3(2) = 8
  auto vals = fam.eval_all(XC(2, 0));
  CHECK(chordal(vals[2].v, XC(8, 0)) < 1e-12);
}

TEST_CASE("iterate enumeration nests without drift") {
  EnumeratedFamily fam =
      enumerate_family(load_family_file(corpus("sq.json")), 10);
  REQUIRE(fam.size() == 10);
  CHECK(fam.members[0].label == "f^1");
  CHECK(fam.members[9].label == "f^10");
  // f^10(z) = z^1024
  auto vals = fam.eval_all(XC(0.9, 0));
  REQUIRE(vals[9].ok);
  double expect = std::pow(0.9, 1024.0);
  CHECK(std::abs(vals[9].v.value().real() - expect) < 1e-12);
  CHECK(vals[9].v.value().imag() == 0.0);
  // parent chaining: each iterate feeds the next
  for (std::size_t k = 1; k < fam.size(); ++k)
    CHECK(fam.members[k].parent == static_cast<int>(k) - 1);
}

TEST_CASE("list families truncate to their length") {
  FamilySpec spec = load_family_file(corpus("translations.json"));
  CHECK(enumerate_family(spec, 1000).size() == 324);
  EnumeratedFamily ten = enumerate_family(spec, 10);
  REQUIRE(ten.size() == 10);
  CHECK(ten.members[0].label == "m1");
  CHECK(ten.members[9].label == "m10");
}

TEST_CASE("duplicate members are flagged, not dropped") {
  // i^n * z has period 4 in n
  FamilySpec spec = family_from_json_text(
      R"({"name":"turns","kind":"sequence","expr":"i^n*z","index_start":1})");
  EnumeratedFamily fam = enumerate_family(spec, 8);
  REQUIRE(fam.size() == 8);
  CHECK(fam.members[4].duplicate_of == 0);  // n=5 repeats n=1
  CHECK(fam.members[5].duplicate_of == 1);
  CHECK(fam.members[3].duplicate_of == -1);
}

TEST_CASE("family schema is strict") {
  CHECK_THROWS_AS(family_from_json_text(R"({"kind":"sequence"})"), Error);
  CHECK_THROWS_AS(
      family_from_json_text(
          R"({"name":"x","kind":"sequence","expr":"z^n","bogus":1})"),
      Error);
  CHECK_THROWS_AS(
      family_from_json_text(R"({"name":"x","kind":"iterates","members":[]})"),
      Error);
  FamilySpec rot = load_family_file(corpus("rotations.json"));
  CHECK(rot.kind == FamilyKind::sequence);
  CHECK(rot.params.count("w") == 1);
}

TEST_CASE("composition closure probe") {
  FamilySpec powers = load_family_file(corpus("powers.json"));
  CHECK(is_composition_closed(powers, 2).closed);
  // finite-budget closure: z^3 o z^3 = z^9 is past the doubled budget
  CompositionCheck far = is_composition_closed(powers, 3);
  CHECK_FALSE(far.closed);

  FamilySpec plus1 = load_family_file(corpus("powersplus1.json"));
  CompositionCheck c = is_composition_closed(plus1, 2);
  CHECK_FALSE(c.closed);
  REQUIRE(c.witness.has_value());
  CHECK(c.witness_label.find("n=") == 0);
}

TEST_CASE("evaluation failures are per-member, not fatal") {
  EnumeratedFamily fam =
      enumerate_family(load_family_file(corpus("expiter.json")), 6);
  auto vals = fam.eval_all(XC(10, 0));
  REQUIRE(vals.size() == 6);
  CHECK(vals[0].ok);  // e^10 is finite
  bool saw_error = false;
  for (const auto& v : vals)
    if (!v.ok && v.err == Errc::essential) saw_error = true;
  CHECK(saw_error);  // the tower reaches exp(inf) within six steps
}
