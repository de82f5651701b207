#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtbp/basins.hpp"
#include "mtbp/model.hpp"
#include "mtbp/spectral.hpp"

namespace mtbp {

// Locates every fixed point of f strictly above the all-ones point. All of
// them live on the unstable set separating S0 from SInfty, so the search
// space is the (d-1)-sphere of ray directions rather than the full orthant.

struct FixedPoint {
  QVec q;
  double residual = 0.0;  // sup-norm of f(q) - q
  int newton_iters = 0;
  Eigen::VectorXd seed_direction;  // mesh direction whose seed converged here
};

struct FixedPointReport {
  std::vector<FixedPoint> points;  // sorted lexicographically by coordinates
  int grid_per_axis = 0;
  double dedup_radius = 0.0;
  int candidates = 0;     // polished candidates before filtering
  int nonconverged = 0;   // candidates whose polish stalled above tolerance
  int rays_solved = 0;
  int rays_failed = 0;
  // Hypotheses passed yet nothing was found: numerically impossible by the
  // existence theorem, so flag it loudly instead of returning quietly.
  bool contradicts_theorem = false;
};

struct FixedPointOptions {
  int grid_per_axis = 9;
  double tol = 1e-10;
  double dedup_radius = 1e-6;
  std::vector<QVec> extra_seeds;  // additional Newton starts (continuation)
  // Accept points with coordinates at 1 within float resolution, keeping
  // only the trivial all-ones point excluded. Truncations of strongly graded
  // families have fixed points whose trailing coordinates sit closer to 1
  // than any fixed interior margin, so the scan machinery opts in.
  bool allow_boundary = false;
};

// Tangential components of g(lambda)/|g(lambda)| - u in a fixed chart of the
// direction sphere at u; d=2 reduces to the signed angle difference, d=1 to
// the empty vector.
Eigen::VectorXd direction_residual(const ProcessModel& m, const RayPoint& rayp);

FixedPointReport find_fixed_points(const ProcessModel& m, const FixedPointOptions& opt);
FixedPointReport find_fixed_points(const ProcessModel& m, int grid_per_axis = 9,
                                   double tol = 1e-10);

struct FixedPointCheck {
  QVec q;
  double residual = 0.0;       // float recomputation
  bool exact_mode = false;     // rational recheck performed
  std::string residual_exact;  // exact residual as a rational string when available
  bool exact_zero = false;     // exact residual is identically zero
  bool above_one = false;      // all coordinates > 1
  bool is_one = false;         // the trivial fixed point
  bool sub_unit = false;       // all coordinates < 1 (extinction side)
  double jac_rho = 0.0;        // spectral radius of the Jacobian at q
  std::string stability;       // attracting | repelling | neutral
  bool accepted = false;       // residual within tolerance
};

FixedPointCheck verify_fixed_point(const ProcessModel& m, const QVec& q, double tol = 1e-10);
// Exact recheck for rational models with rational candidate coordinates.
FixedPointCheck verify_fixed_point_exact(const ProcessModel& m, const std::vector<Rational>& q,
                                         double tol = 1e-10);

}  // namespace mtbp
