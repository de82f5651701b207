#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtbp/model.hpp"
#include "mtbp/spectral.hpp"

namespace mtbp {

// Orbit classification of log-space points under the map g = log f(exp .).
// A point belongs to S0 when the orbit dies to 0, to SInfty when it blows
// up; the residual set (the unstable manifold separating the two) can only
// ever be reported as Undecided at finite precision.

enum class Verdict { S0, SInfty, Undecided };
enum class CertKind { Monotone, EpsBox, CBox, Saturation };
enum class CertDirection { Below, Above };

const char* to_string(Verdict v);
const char* to_string(CertKind k);
const char* to_string(CertDirection d);

struct BasinCertificate {
  CertKind kind;
  // Monotone: orbit[k_offset + m] compared with orbit[k_offset], strictly
  // below (S0) or strictly above (SInfty) in the componentwise order with
  // at least one strict coordinate. Box and saturation certificates use
  // k_offset for the orbit index that entered the absorbing region (m = 0).
  int m = 0;
  int k_offset = 0;
  CertDirection direction = CertDirection::Below;
};

struct BasinVerdict {
  Verdict verdict = Verdict::Undecided;
  std::optional<BasinCertificate> certificate;
  int orbit_len = 0;  // number of g applications performed
};

struct BasinContext {
  const ProcessModel* model = nullptr;
  EvalCache cache;
  // Absorbing boxes. eps-box: any orbit point <= lambda0 componentwise is
  // trapped below a strict supersolution, hence in S0. C-box: any orbit
  // point with min coordinate >= C satisfies g^(N) > id there, hence SInfty.
  bool has_eps_box = false;
  LambdaVec lambda0;
  bool has_c_box = false;
  double C = 0.0;
};

// Builds a context with both absorbing boxes (requires the full analysis).
BasinContext make_basin_context(const ProcessModel& m, const ModelAnalysis& a);
// Degraded context: boxes attached only where the witnesses exist
// (supercritical models keep the C-box but lose the eps-box).
BasinContext make_basin_context(const ProcessModel& m);

inline constexpr int kDefaultMaxIters = 10000;
inline constexpr int kCompareWindow = 16;

BasinVerdict classify(const BasinContext& ctx, const LambdaVec& lambda,
                      int max_iters = kDefaultMaxIters);

// Re-derives the certificate by fresh iteration from lambda; returns false
// if the recorded inequalities do not hold when recomputed from scratch.
bool revalidate(const BasinContext& ctx, const LambdaVec& lambda, const BasinVerdict& v);

struct RayPoint {
  Eigen::VectorXd u;   // unit direction, coords >= 0
  double r = 0.0;      // midpoint of the final bracket
  double r_lo = 0.0;   // S0-certified radius
  double r_hi = 0.0;   // SInfty-certified radius
  BasinCertificate lo_cert;
  BasinCertificate hi_cert;
  int steps = 0;       // classify calls spent bisecting
  bool converged = false;  // r_hi - r_lo <= tol reached
};

inline constexpr int kMaxBisectSteps = 200;

RayPoint ray_bisect(const BasinContext& ctx, const Eigen::VectorXd& u, double tol = 1e-10);

struct MeshResult {
  std::vector<RayPoint> rays;
  std::vector<int> failed;            // indices into directions
  std::vector<std::string> messages;  // one per failure
  std::vector<Eigen::VectorXd> directions;
};

// Deterministic direction set on the positive orthant of the unit sphere:
// d=1 the single direction, d=2 uniform angles including both axes, d>=3
// a simplex composition grid pushed to the sphere (level auto-capped so the
// direction count stays near 600).
std::vector<Eigen::VectorXd> direction_mesh(int d, int grid_per_axis);

MeshResult lambda_mesh(const BasinContext& ctx, int grid_per_axis, double tol = 1e-10);

}  // namespace mtbp
