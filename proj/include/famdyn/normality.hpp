#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "famdyn/family.hpp"
#include "famdyn/orbits.hpp"
#include "famdyn/region.hpp"
#include "famdyn/report.hpp"

namespace famdyn {

inline constexpr double kDefaultMartyThreshold = 1e6;

/// Growth slopes within this band of zero count as "no growth"; keeps the
/// least-squares fit's noise from flipping verdicts.
inline constexpr double kSlopeTol = 0.05;

struct MartySup {
  std::string label;
  double sup = 0;
  bool ok = true;        // at least one subgrid sample evaluated
  bool flagged = false;  // some samples failed or needed the rational route
  Errc err = Errc::none; // representative failure, when flagged
};

/**
 * Per-member sup of the spherical derivative |f'|/(1+|f|^2) over a
 * grid_n x grid_n subgrid of D(z0, radius), plus the least-squares slope of
 * log-sup against log-ordinal over the members with a positive sup. Members
 * whose every sample fails are reported with ok = false and excluded from
 * the fit.
 */
struct MartyProfile {
  double radius = 0;
  std::vector<MartySup> sups;
  double max_sup = 0;
  double slope = 0;
  long usable = 0;  // members entering the slope fit
  std::vector<std::string> notes;
};

MartyProfile marty_profile(const EnumeratedFamily& fam, const XC& z0,
                           double radius, int grid_n = 41);

/**
 * Three-valued normality oracle at z0. A single radius r is refined
 * internally to {r, r/2, r/4, r/8, r/16}. Verdicts:
 *   "non-normal"       — max sup exceeds `threshold` with growth slope
 *                        above kSlopeTol on every radius;
 *   "normal-evidence"  — sups bounded by `threshold` with slope at most
 *                        kSlopeTol at the smallest radius;
 *   "inconclusive"     — anything else.
 * Convergence is judged chordally (divergence to a constant infinity counts
 * as convergence); every report carries the mode flag.
 */
AnalysisReport is_normal_at(const EnumeratedFamily& fam, const XC& z0,
                            const std::vector<double>& radii,
                            double threshold = kDefaultMartyThreshold,
                            int grid_n = 41, std::uint64_t seed = 0);

/**
 * Codomain cells never hit by any member image of the domain net. Marks are
 * HITS: a cell is omitted iff unmarked. Sampling marks first; cells still
 * unmarked are then probed for rational members by solving f = center inside
 * the domain (argument principle on disk domains, root back-substitution
 * elsewhere), so sampling gaps cannot fake an omitted value.
 */
CellSetResult omitted_values(const EnumeratedFamily& fam, const Region& domain,
                             double domain_eps, const Region& codomain,
                             double codomain_eps, std::uint64_t seed = 0);

/**
 * When the family robustly omits at least 3 codomain cells, or is uniformly
 * bounded on the domain (max modulus below `bound` with non-growing modulus
 * slope), asserts that is_normal_at is never "non-normal" on the domain net.
 * Verdicts: "consistent" | "violated" | "precondition-not-met".
 */
AnalysisReport montel_consistency(const EnumeratedFamily& fam,
                                  const Region& domain, double domain_eps,
                                  const Region& codomain, double codomain_eps,
                                  double threshold = kDefaultMartyThreshold,
                                  double bound = kDefaultMartyThreshold,
                                  std::uint64_t seed = 0);

/// Pixel classification of a rectangular window: marked pixels are the
/// non-normal or inconclusive ones (the complement of the normality set).
struct FatouJulia {
  Grid grid;
  std::vector<std::uint8_t> julia;
  std::vector<double> marty;  // finest-radius max sup per pixel
  std::vector<std::string> notes;

  long julia_count() const;
  Raster raster() const;  // marks = julia, field = marty
  std::string sidecar_json(long budget, double threshold) const;
};

/**
 * Per-pixel normality verdict at pixel-scale radii {2*step, step} on a 9x9
 * subgrid, px pixels across (pixel side = window width / px; pre: px >= 16,
 * rectangular window). Deterministic and scheduling-independent.
 */
FatouJulia fatou_julia(const EnumeratedFamily& fam, const Region& window,
                       int px, double threshold = kDefaultMartyThreshold,
                       std::uint64_t seed = 0);

/**
 * Cross-check: non-normal at z0 should co-occur with weak mixing at z0, and
 * normal-evidence with its failure. Verdicts "agree" | "disagree" | "exempt"
 * (exempt when either side is inconclusive or rests on heuristics).
 */
AnalysisReport weakly_mixing_equivalence_check(
    const EnumeratedFamily& fam, const XC& z0,
    const std::vector<double>& marty_radii, double threshold,
    const std::vector<double>& radii, const std::vector<Complex>& net1,
    const std::vector<Complex>& net2, double eps, std::uint64_t seed = 0);

/// Diagnostic: first domain net point with normal-evidence, if any.
std::optional<Complex> find_normal_disk(const EnumeratedFamily& fam,
                                        const Region& domain,
                                        double domain_eps, double threshold);

}  // namespace famdyn
