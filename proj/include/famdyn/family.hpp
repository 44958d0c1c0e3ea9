#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "famdyn/expr.hpp"

namespace famdyn {

enum class FamilyKind { iterates, semigroup, sequence, list };

const char* family_kind_name(FamilyKind k);

/// Declarative description of a function family. `sources` holds the single
/// generator (iterates), the generator list (semigroup), the n-indexed
/// template (sequence), or the member list (list). Parameters are bound at
/// enumeration time.
struct FamilySpec {
  std::string name;
  FamilyKind kind = FamilyKind::sequence;
  std::vector<Expr> sources;
  std::map<std::string, Complex> params;
  long index_start = 1;
};

/// Parses the family file schema: {"name", "kind", "expr" | "generators" |
/// "members", "params" {name: point}, "index_start"}. Unknown keys are
/// rejected; kind-specific required fields enforced.
FamilySpec family_from_json_text(const std::string& text);
FamilySpec load_family_file(const std::string& path);

struct Member {
  std::string label;
  Expr expr;  // bound, canonical; compositions stay explicit
  int parent;  // index of the member whose value feeds this one (-1: from z)
  int apply;   // which bound source to apply to the parent value (-1: direct)
  int duplicate_of;  // first member with an identical probe signature, or -1
  bool rational;     // no exp node anywhere
};

struct EvalResult {
  bool ok = false;
  XC v;
  Errc err = Errc::none;
};

struct DualResult {
  bool ok = false;
  XC v, d;
  Errc err = Errc::none;
};

/// An enumerated prefix of a family. Values of *all* members at one point are
/// produced in one pass: iterates and semigroup words reuse the parent
/// member's value, so a budget-B prefix costs O(B) applications instead of
/// O(B^2) tree walks.
class EnumeratedFamily {
 public:
  FamilySpec spec;
  std::vector<Expr> bound_sources;
  std::vector<Member> members;

  std::size_t size() const { return members.size(); }

  void eval_all(const XC& z, std::vector<EvalResult>& out) const;
  void eval_all_dual(const XC& z, std::vector<DualResult>& out) const;
  std::vector<EvalResult> eval_all(const XC& z) const;
};

/**
 * First `budget` members in canonical order: iterates by power, semigroup
 * words breadth-first then lexicographic, sequences by index, lists as
 * given (truncated to the list length). Members that agree with an earlier
 * member at 13 fixed probe points (chordal 1e-12) are flagged as duplicates
 * but retained under their own label.
 */
EnumeratedFamily enumerate_family(const FamilySpec& spec, long budget);

struct CompositionCheck {
  bool closed = false;
  // indices of the first witnessing pair when not closed
  std::optional<std::pair<int, int>> witness;
  std::string witness_label;  // "label_i o label_j"
};

/// Is f_i o f_j reproduced by some member within a doubled budget, for every
/// pair among the first `depth` members? Agreement is chordal within 1e-9 at
/// `samples` fixed sample points.
CompositionCheck is_composition_closed(const FamilySpec& spec, long depth,
                                       int samples = 7);

/// The 13 probe points used for duplicate detection and sampling defaults.
const std::vector<Complex>& probe_points();

bool expr_is_rational(const Expr& e);

}  // namespace famdyn
