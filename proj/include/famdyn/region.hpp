#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "famdyn/sphere.hpp"

namespace famdyn {

/// A planar region: "rect:x0,y0,x1,y1", "disk:cx,cy,r",
/// "annulus:cx,cy,r0,r1", or the one-dimensional "circle:cx,cy,r".
struct Region {
  enum class Kind { rect, disk, annulus, circle };
  Kind kind = Kind::rect;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rect corners, x0<x1, y0<y1
  Complex center;                          // disk/annulus/circle
  double r0 = 0, r1 = 0;                   // annulus radii; disk/circle use r1

  static Region parse(const std::string& text);
  std::string str() const;

  /// Membership with a euclidean slack (points within `tol` of the region
  /// count as inside). For circles membership means lying on the curve.
  bool contains(const Complex& z, double tol = 0.0) const;
  bool contains(const XC& z, double tol = 0.0) const;

  Complex clamp(const Complex& z) const;  // nearest point of the region
  double dist(const Complex& z) const;    // euclidean distance to the region
  void bbox(double& bx0, double& by0, double& bx1, double& by1) const;
  Complex sample_interior() const;  // a representative interior point
};

struct GridCell {
  long i = 0, j = 0;  // column, row (circle regions use i along the arc, j=0)
  Complex center;
};

/// Discretization of a region at resolution eps: square cells of side eps for
/// planar regions (cells whose center lies in the region), arc points with
/// spacing <= eps for circle regions.
class Grid {
 public:
  Region region;
  double eps = 0;
  double ox = 0, oy = 0;  // grid origin (bbox min corner)
  long nx = 0, ny = 0;    // cell counts (circle: nx = arc count, ny = 1)

  std::vector<GridCell> cells;

  /// Ordinal of the in-region cell containing z, if any.
  std::optional<std::size_t> cell_index(const Complex& z) const;
  /// In-region neighbors of cell k: 8-neighborhood for planar regions, the
  /// two arc neighbors for circles.
  std::vector<std::size_t> neighbors(std::size_t k) const;

 private:
  std::map<std::pair<long, long>, std::size_t> lookup_;
  friend Grid make_grid(const Region& r, double eps);
};

Grid make_grid(const Region& r, double eps);

/**
 * eps-net of the region: centers of the side-eps cells meeting the region
 * (arc points at spacing eps for circles), so every region point lies within
 * euclidean eps/sqrt(2) — hence chordal eps*sqrt(2) — of a net point. Net
 * points of boundary cells may sit slightly outside the region.
 */
std::vector<Complex> make_net(const Region& r, double eps);

/// Labeled point set with chordal merge tolerance 1e-12; CSV "re,im,label".
class PointSet {
 public:
  struct Entry {
    XC z;
    std::string label;
  };
  bool add(const XC& z, const std::string& label);  // false if merged away
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void sort_canonical();
  std::string csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<Entry> entries_;
};

/// Raster over a rectangle: nx*ny square cells of side `step`, origin at the
/// lower-left corner. Holds marks and an optional scalar field; serializes to
/// binary PGM (marks black/white, field log-scaled grayscale) plus a JSON
/// sidecar describing the geometry.
struct Raster {
  long nx = 0, ny = 0;
  double ox = 0, oy = 0, step = 0;
  std::vector<std::uint8_t> marks;
  std::vector<double> field;  // empty unless used

  Raster() = default;
  Raster(long nx_, long ny_, double ox_, double oy_, double step_);
  std::size_t idx(long i, long j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }
  Complex center(long i, long j) const {
    return Complex(ox + (i + 0.5) * step, oy + (j + 0.5) * step);
  }
  /// PGM row 0 is the top row (max y), matching image conventions.
  void write_pgm(const std::string& path, const std::string& meta_json) const;
};

std::string format_csv_point(const XC& z);

}  // namespace famdyn
