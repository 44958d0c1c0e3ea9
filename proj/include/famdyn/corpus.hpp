#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace famdyn {

struct CorpusLine {
  std::string name;    // "<family>.<check>"
  bool ok = false;
  std::string detail;  // verdict(s) or the mismatch description
};

struct CorpusOutcome {
  int exit_code = 0;  // 0 clean, 2 on any expectation mismatch or violation
  std::vector<CorpusLine> lines;
  long meyrath_certified = 0;  // equivalence pairs that settled on "agree"

  std::string summary() const;  // one "ok|FAIL name detail" line per check
};

/**
 * Runs the whole pinned check battery: loads every family listed in
 * <corpus_dir>/expectations.json, executes its transitivity / minimality /
 * preimage-density / normality / mixing / omega / invariance / expanding /
 * nonwandering / Fatou-Julia checks against the recorded expectations, and
 * writes every report, CSV, and raster into out_dir. Output is deterministic:
 * two runs with the same seed produce byte-identical trees. Cell sets are
 * additionally screened for grid-closure violations.
 */
CorpusOutcome run_corpus(const std::string& corpus_dir,
                         const std::string& out_dir, std::uint64_t seed);

}  // namespace famdyn
