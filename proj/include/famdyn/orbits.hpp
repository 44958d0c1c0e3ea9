#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "famdyn/family.hpp"
#include "famdyn/region.hpp"

namespace famdyn {

/// {f(z0) : f in the enumerated prefix}, labels preserved, 1e-12 merge.
/// A member evaluation error is rethrown with the member's label attached.
PointSet orbit_set(const EnumeratedFamily& fam, const XC& z0);

/**
 * Chordal cluster points of the orbit tail (last half of the enumeration,
 * so the prefix must hold at least 16 members). Tail values are sorted
 * canonically and leader-clustered at cluster_eps; points of clusters with
 * fewer than 3 hits are reassigned to the nearest qualified cluster when
 * within 2*cluster_eps; qualified clusters (>= 3 points) yield centroids.
 */
PointSet omega_limit(const EnumeratedFamily& fam, const XC& z0,
                     double cluster_eps);

struct InvarianceWitness {
  std::string label;
  XC z;      // the set point that moved
  XC image;  // where it went (forward) / the offending preimage (backward)
  Errc err = Errc::none;  // evaluation failure, when that is the violation
};

struct InvarianceResult {
  bool invariant = true;
  std::vector<InvarianceWitness> witnesses;  // first violation only
  std::vector<std::string> notes;
};

/// Every member maps every point of S within chordal tol of S.
InvarianceResult is_forward_invariant(const EnumeratedFamily& fam,
                                      const PointSet& S, double tol);

/// Every preimage of every point of S lies within chordal tol of S.
/// Requires rational members throughout the prefix.
InvarianceResult is_backward_invariant(const EnumeratedFamily& fam,
                                       const PointSet& S, double tol,
                                       std::uint64_t seed);

struct NonwanderingWitness {
  double radius = 0;
  std::string label;
  XC z;        // sample in the disk
  XC image;    // its image (sample certificates)
  long count = 0;  // solution count (winding certificates)
  std::string method;  // "sample" | "winding"
};

struct NonwanderingResult {
  // "nonwandering" | "wandering-at-resolution" | "inconclusive"
  std::string verdict;
  std::vector<NonwanderingWitness> witnesses;  // one per certified radius
  double failed_radius = 0;  // first radius with no witness, if any
  std::vector<std::string> notes;
};

/**
 * For each radius r (strictly decreasing) searches the member prefix for
 * f(D(z0,r)) meeting D(z0,r): a sampled point of the disk whose image lands
 * back in the disk, upgraded to an argument-principle certificate
 * (count_solutions_in > 0) for rational members when certify is set; a
 * winding sweep over a disk net runs when sampling misses. Nonwandering iff
 * every radius is certified; a clean miss at some radius gives
 * wandering-at-resolution; misses polluted by evaluation or winding errors
 * give inconclusive.
 */
NonwanderingResult is_nonwandering(const EnumeratedFamily& fam, const XC& z0,
                                   const std::vector<double>& radii,
                                   bool certify = true, std::uint64_t seed = 0);

struct CellSetResult {
  Grid grid;
  std::vector<std::uint8_t> marks;
  bool proper = false;   // hull only: marked set is a proper subset
  bool escaped = false;  // hull only: some image left the region
  std::vector<std::string> notes;

  long marked_count() const;
  Raster raster() const;  // planar grids; circle grids produce a 1-row strip
  /// {"region","eps","marked_count","cells":[...]} sidecar.
  std::string sidecar_json() const;
};

/// Marks cells whose center is nonwandering at resolution eps (single radius
/// eps, sampling certificates).
CellSetResult nonwandering_set(const EnumeratedFamily& fam, const Region& r,
                               double eps, bool certify = false,
                               std::uint64_t seed = 0);

/// Marks cells whose center's orbit comes within chordal eps of every target
/// point within the enumerated prefix.
CellSetResult universal_points(const EnumeratedFamily& fam,
                               const Region& domain, double domain_eps,
                               const std::vector<Complex>& target,
                               double eps);

/**
 * Grid fixpoint of "apply every member to a 5-point cell stencil, mark the
 * cell containing each image" starting from the seed cells. Images leaving
 * the region set the escaped flag. `proper` reports whether the fixpoint
 * left any cell unmarked.
 */
CellSetResult forward_invariant_hull(const EnumeratedFamily& fam,
                                     const std::vector<Complex>& seeds,
                                     const Region& r, double eps);

/// Unmarked cells all of whose in-grid neighbors are marked — the discrete
/// obstruction to closedness of the marked set.
std::vector<std::size_t> grid_closure_violations(
    const Grid& g, const std::vector<std::uint8_t>& marks);

}  // namespace famdyn
