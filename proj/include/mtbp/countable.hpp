#pragma once

#include <string>
#include <vector>

#include "mtbp/fixedpoint.hpp"
#include "mtbp/model_io.hpp"

namespace mtbp {

// Truncation analysis for tabulated countable-type families: kill every
// individual of type above d, locate the truncated fixed points, and track
// the per-coordinate sequence across a d-schedule.

// Drops offspring of types > d from every entry (the q_{j>d} = 1
// substitution) and merges entries whose truncated count vectors collide.
ProcessModel truncate(const CountableFamily& fam, int d);

struct TruncationRecord {
  int d = 0;
  FixedPointReport report;
  QVec representative;      // chosen fixed point in q-space
  LambdaVec rep_lambda;     // its log form
  double sup_diff_prev = 0.0;  // sup-norm step from the previous level (shared coords)
  bool has_prev = false;
  Eigen::VectorXd bound;    // per-coordinate cap log(1/p_kk) from this level's witness
  bool bound_ok = false;    // rep_lambda <= bound componentwise (small slack)
  double max_head = 0.0;    // max of rep_lambda over the first min(2, d) coords
};

struct TruncationScan {
  std::vector<TruncationRecord> records;
  bool aborted = false;
  int abort_d = 0;
  std::string abort_reason;
};

// Runs find_fixed_points on each truncation in the schedule. The
// representative at each level is the point nearest in sup-norm over shared
// coordinates to the previous representative (lexicographically smallest at
// the first level), and the previous point extended by ones seeds the next
// Newton multistart.
TruncationScan truncation_scan(const CountableFamily& fam, const std::vector<int>& schedule,
                               const FixedPointOptions& finder = {});

struct AssumptionVerdict {
  std::string name;
  std::string verdict;  // SAMPLED-PASS | FAIL | UNCHECKABLE
  std::string witness;  // failing sample or diagnostic notes
  double worst = 0.0;   // worst margin observed on the sample set
};

struct AssumptionsReport {
  std::vector<AssumptionVerdict> items;
  bool all_pass = false;
};

// Sampled checks of the three quantified assumptions on the tabulated range;
// verdicts are explicitly sampled, never proofs. The spatial-growth check
// samples q with f_k(q) <= q_k and inspects f_k(q^{3/2}); the growth-in-k
// check compares f_k against psi(k) f_1^{phi(k)} on deterministic grids; the
// weighted-subcriticality check evaluates the tilted means exactly per type.
AssumptionsReport check_assumptions(const CountableFamily& fam);

}  // namespace mtbp
