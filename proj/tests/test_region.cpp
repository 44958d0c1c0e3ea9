#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "famdyn/region.hpp"
#include "famdyn/sphere.hpp"

using namespace famdyn;

TEST_CASE("region parse and round trip") {
  for (const char* s : {"rect:-1,-1,1,1", "disk:0,0,0.9", "annulus:0,0,0.5,2",
                        "circle:0,0,1", "rect:-1.5,-1.5,1.5,1.5"}) {
    Region r = Region::parse(s);
    CHECK(Region::parse(r.str()).str() == r.str());
  }
  CHECK_THROWS_AS(Region::parse("blob:1,2,3"), Error);
  CHECK_THROWS_AS(Region::parse("rect:1,1,0,0"), Error);   // inverted corners
  CHECK_THROWS_AS(Region::parse("disk:0,0,-1"), Error);    // negative radius
  CHECK_THROWS_AS(Region::parse("annulus:0,0,2,1"), Error);
}

TEST_CASE("membership, clamp and distance") {
  Region disk = Region::parse("disk:0,0,1");
  CHECK(disk.contains(Complex(0.5, 0.5)));
  CHECK_FALSE(disk.contains(Complex(1.2, 0)));
  CHECK(disk.contains(Complex(1.05, 0), 0.1));  // slack
  CHECK(disk.dist(Complex(3, 0)) == doctest::Approx(2.0));
  CHECK(disk.dist(Complex(0.2, 0)) == 0.0);
  CHECK(std::abs(disk.clamp(Complex(3, 0)) - Complex(1, 0)) < 1e-12);

  Region circ = Region::parse("circle:0,0,1");
  CHECK(circ.contains(Complex(0, 1)));
  CHECK_FALSE(circ.contains(Complex(0.9, 0)));  // interior is off the curve
  CHECK(circ.dist(Complex(0, 0)) == doctest::Approx(1.0));

  Region ann = Region::parse("annulus:0,0,0.5,2");
  CHECK(ann.contains(Complex(1, 0)));
  CHECK_FALSE(ann.contains(Complex(0.2, 0)));
  CHECK(ann.dist(Complex(0.25, 0)) == doctest::Approx(0.25));
}

TEST_CASE("nets cover their region at the stated resolution") {
  Region disk = Region::parse("disk:0,0,0.9");
  auto net = make_net(disk, 0.4);
  CHECK(net.size() == 25);  // center-anchored lattice on the 0.9 disk
  for (const Complex& p : net) CHECK(disk.dist(p) <= 0.4 * 0.7072);
  bool has_origin = false;
  for (const Complex& p : net)
    if (std::abs(p) == 0.0) has_origin = true;
  CHECK(has_origin);

  CHECK(make_net(disk, 0.1).size() == 293);

  // covering property: random region points are close to some net point
  for (int k = 0; k < 200; ++k) {
    double a = 2 * 3.141592653589793 * (k / 200.0);
    double rr = 0.9 * ((k % 17) / 17.0);
    Complex z(rr * std::cos(a), rr * std::sin(a));
    double best = 1e9;
    for (const Complex& p : net)
      best = std::min(best, std::abs(z - p));
    CHECK(best <= 0.4 / std::sqrt(2.0) + 1e-12);
  }

  // circles get arc points
  auto arc = make_net(Region::parse("circle:0,0,1"), 0.1);
  CHECK(arc.size() == 63);  // ceil(2*pi/0.1)
  for (const Complex& p : arc)
    CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
}

TEST_CASE("grids index their own cells") {
  Grid g = make_grid(Region::parse("rect:-1,-1,1,1"), 0.5);
  CHECK(g.nx == 4);
  CHECK(g.ny == 4);
  REQUIRE(g.cells.size() == 16);
  for (std::size_t k = 0; k < g.cells.size(); ++k) {
    auto idx = g.cell_index(g.cells[k].center);
    REQUIRE(idx.has_value());
    CHECK(*idx == k);
  }
  CHECK_FALSE(g.cell_index(Complex(5, 5)).has_value());

  // interior cells have 8 neighbors, corners 3
  std::multiset<std::size_t> degs;
  for (std::size_t k = 0; k < g.cells.size(); ++k)
    degs.insert(g.neighbors(k).size());
  CHECK(degs.count(8) == 4);   // the 4 interior cells
  CHECK(degs.count(3) == 4);   // corners
  CHECK(degs.count(5) == 8);   // edges

  Grid c = make_grid(Region::parse("circle:0,0,1"), 0.1);
  CHECK(c.cells.size() == 63);
  for (std::size_t k = 0; k < c.cells.size(); ++k)
    CHECK(c.neighbors(k).size() == 2);  // the arc is a cycle
  auto idx = c.cell_index(Complex(1, 0.01));
  REQUIRE(idx.has_value());
  CHECK(*idx == 0);
}

TEST_CASE("point sets merge near-duplicates") {
  PointSet ps;
  CHECK(ps.add(XC(1, 0), "a"));
  CHECK_FALSE(ps.add(XC(1 + 1e-14, 0), "b"));  // merged into a
  CHECK(ps.add(XC(2, 0), "c"));
  CHECK(ps.size() == 2);
  std::string csv = ps.csv();
  CHECK(csv.find("1,0,a") != std::string::npos);
  CHECK(csv.find("2,0,c") != std::string::npos);

  PointSet inf;
  inf.add(XC::infinity(), "far");
  CHECK(inf.csv().find("inf") != std::string::npos);
}

TEST_CASE("raster serializes to a readable PGM") {
  Raster r(4, 3, 0.0, 0.0, 1.0);
  r.marks.assign(12, 0);
  r.marks[r.idx(0, 0)] = 1;  // bottom-left cell
  std::string path = "test_raster_tmp.pgm";
  r.write_pgm(path, "{\"note\":\"test\"}");

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  in >> magic >> w >> h >> maxv;
  CHECK(magic == "P5");
  CHECK(w == 4);
  CHECK(h == 3);
  CHECK(maxv == 255);
  in.get();  // single whitespace after the header
  std::vector<unsigned char> px(12);
  in.read(reinterpret_cast<char*>(px.data()), 12);
  REQUIRE(in.gcount() == 12);
  // row 0 of the file is the TOP row; the marked cell is bottom-left
  CHECK(px[0 * 4 + 0] == px[0 * 4 + 1]);      // top row uniform
  CHECK(px[2 * 4 + 0] != px[2 * 4 + 1]);      // bottom row has the mark
  std::remove(path.c_str());

  std::ifstream meta(path + ".json");
  bool have_meta = meta.good();
  CHECK(have_meta);
  std::remove((path + ".json").c_str());
}
