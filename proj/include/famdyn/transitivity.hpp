#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "famdyn/family.hpp"
#include "famdyn/region.hpp"
#include "famdyn/report.hpp"

namespace famdyn {

/**
 * Topological transitivity at a base point, at finite resolution: holds iff
 * for every radius r (strictly decreasing list) and every net point w, some
 * member has f(D(z0,r)) meeting the chordal disk D(w,eps). Sampled hits are
 * upgraded to argument-principle certificates for rational members; a
 * winding sweep over the net targets runs when sampling misses. Verdicts:
 * "holds-with-witness" (all certified), "holds (heuristic)" (some witness
 * only sampled), "fails-at-resolution", "inconclusive" (a miss polluted by
 * evaluation or winding errors). With B given, net points farther than eps
 * from B are dropped first.
 */
AnalysisReport is_transitive_at(const EnumeratedFamily& fam, const XC& z0,
                                const std::vector<double>& radii,
                                const std::vector<Complex>& net, double eps,
                                const std::optional<Region>& B,
                                std::uint64_t seed);

/// is_transitive_at quantified over a base net of the domain at the largest
/// radius; fails on the first failing base point.
AnalysisReport is_transitive(const EnumeratedFamily& fam, const Region& domain,
                             const std::vector<double>& radii,
                             const std::vector<Complex>& net, double eps,
                             const std::optional<Region>& B,
                             std::uint64_t seed);

/// Holds iff every domain cell center is a universal point: its orbit comes
/// within eps of every target point. Delegates to universal_points.
AnalysisReport is_minimal(const EnumeratedFamily& fam, const Region& domain,
                          double domain_eps, const std::vector<Complex>& target,
                          double eps, std::uint64_t seed);

/**
 * The preimage formulation: for every net value-disk V = D(w,eps), the union
 * over members of the preimages of a 5-point subnet of V must meet every
 * domain cell. Rational members contribute root-finding preimages;
 * non-rational members fall back to cell subsampling (flagged heuristic).
 * Members whose stored representation exceeds the degree cap are skipped
 * with a note.
 */
AnalysisReport dense_preimage_test(const EnumeratedFamily& fam,
                                   const std::vector<Complex>& net, double eps,
                                   const Region& domain, double domain_eps,
                                   std::uint64_t seed);

/// Holds iff for every radius and every pair (V1, V2) from the two nets a
/// single member meets both disks from D(z0,r).
AnalysisReport is_weakly_mixing_at(const EnumeratedFamily& fam, const XC& z0,
                                   const std::vector<double>& radii,
                                   const std::vector<Complex>& net1,
                                   const std::vector<Complex>& net2, double eps,
                                   std::uint64_t seed);

/**
 * Expanding at z0 with respect to the complement of E: for every radius at
 * least Q distinct members cover every K-net point, certified by
 * count_solutions_in >= 1 per point (sampled covering at tolerance k_eps for
 * non-rational members, flagged). Precondition: every K point keeps chordal
 * clearance k_eps from every E point.
 */
AnalysisReport is_expanding_at(const EnumeratedFamily& fam, const XC& z0,
                               const std::vector<Complex>& K, double k_eps,
                               const std::vector<XC>& E,
                               const std::vector<double>& radii, long Q,
                               std::uint64_t seed);

/// Runs is_expanding_at, then is_transitive_at on a net cleared of
/// E-neighborhoods; verdicts "implication-confirmed", "precondition-not-met"
/// (expanding did not hold — no claim), or "violated" (a bug, by theorem).
AnalysisReport expanding_implies_transitive_check(
    const EnumeratedFamily& fam, const XC& z0, const std::vector<Complex>& K,
    double k_eps, const std::vector<XC>& E, const std::vector<double>& radii,
    long Q, const std::vector<Complex>& net, double eps, std::uint64_t seed);

struct WitnessSearch {
  bool found = false;
  std::string label;
  XC value;          // f(z0)
  double dist = 0;   // chordal distance to the V center
};

/// First member with chordal(f(z0), v_center) <= v_radius + eps. None found
/// within the enumerated prefix is a valid outcome.
WitnessSearch compact_transitive_witness(const EnumeratedFamily& fam,
                                         const XC& z0, const Complex& u_center,
                                         double u_radius,
                                         const Complex& v_center,
                                         double v_radius, double eps);

/**
 * Transfer check: pair every F member with a G member (mode "agreement":
 * chordal(f(z0), g(z0)) <= 1e-9; mode "proximity": sup over the 13 probe
 * points of chordal(f,g) <= pair_eps). Missing pairing => "pairing-failed".
 * Otherwise F must be transitive at z0 ("precondition-not-met" when it is
 * not), and G is then asserted transitive at the same resolution:
 * "transfer-confirmed" or "violated" (a bug, by theorem). The pairing table
 * is embedded in the witnesses.
 */
AnalysisReport transitivity_transfer_check(
    const EnumeratedFamily& F, const EnumeratedFamily& G,
    const std::string& mode, const XC& z0, double pair_eps,
    const std::vector<double>& radii, const std::vector<Complex>& net,
    double eps, std::uint64_t seed);

struct ClosureResult {
  bool contained = false;
  std::string label;
  double sup = 0;  // best sup-distance seen (the witness's when contained)
};

/// Some member within chordal eps of the target at every sample point.
ClosureResult closure_contains(const EnumeratedFamily& fam, const Expr& target,
                               const PointSet& samples, double eps);

/// Re-checks every embedded witness of a holds report against a (typically
/// larger) enumeration: members found by label, samples re-evaluated, hits
/// re-measured, winding counts recomputed. True iff all witnesses survive.
bool revalidate_witnesses(const EnumeratedFamily& fam,
                          const AnalysisReport& report);

}  // namespace famdyn
