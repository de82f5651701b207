#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtbp/model.hpp"

namespace mtbp {

enum class Criticality { Subcritical, Critical, Supercritical };

const char* to_string(Criticality c);

// Raised when an operation needs hypotheses the model fails; `failed` lists
// the hypothesis names for CLI and report output.
struct HypothesisError : std::runtime_error {
  HypothesisError(std::string msg, std::vector<std::string> names)
      : std::runtime_error(std::move(msg)), failed(std::move(names)) {}
  std::vector<std::string> failed;
};

struct SpectralReport {
  Eigen::MatrixXd M;
  double rho = 0.0;
  Eigen::VectorXd v;  // right Perron vector, sup-norm 1, strictly positive
  Criticality criticality = Criticality::Subcritical;
  bool near_critical = false;  // |rho - 1| < 1e-6
  bool positive_regular = false;
  int pr_witness_N = 0;  // smallest N <= d^2-2d+2 with M^N entrywise positive
  bool non_singular = false;
  int ns_witness_type = 0;  // 1-based index of a type with >= 2 total offspring
  bool perron_converged = false;
  int perron_iterations = 0;     // matrix-vector applications consumed
  bool perron_fallback = false;  // shifted iteration used (model not positive regular)
};

// Horizon N together with certified lower bounds on the pair probabilities
//   p_{k,j}(N) = P_k[X_j(N) >= 1 and X_k(N) >= 1]   (j != k)
//   p_{k,k}(N) = P_k[X_k(N) >= 2]
// stored in log space. The bounds come from a max-product search over the
// two ancestral lines of a witness pair, so each is a product of entry
// probabilities along an explicit realization.
struct GfPosWitness {
  int N = 0;
  Eigen::MatrixXd log_p;  // (k, j), natural log of the certified lower bound
  double log_m_min = 0.0;
  double C = 0.0;  // log(1 / m_min): orbit points at or above this level escape
};

// Strict supersolution just above the all-ones point: f(q0) < q0.
struct GfBdedWitness {
  double eps = 0.0;
  QVec q0;
  LambdaVec lambda0;  // log q0, the componentwise box certifying extinction
};

std::pair<bool, int> check_positive_regular(const ProcessModel& m);
std::pair<bool, int> check_non_singular(const ProcessModel& m);

struct PerronOptions {
  double tol = 1e-12;
  int max_matvecs = 100000;
};

struct PowerResult {
  double rho = 0.0;
  Eigen::VectorXd v;
  int matvecs = 0;
  bool converged = false;
};

// Power iteration on A^N for a non-negative matrix (N a primitivity witness
// of the support pattern); N = 0 iterates the shift A + I instead, whose
// dominant eigenvalue is rho(A) + 1 for any non-negative A.
PowerResult power_spectral_radius(const Eigen::MatrixXd& A, int N, const PerronOptions& opt = {});

SpectralReport analyze_spectral(const ProcessModel& m, const PerronOptions& opt = {});

GfPosWitness gf_pos_witness(const ProcessModel& m);
GfBdedWitness gf_bded_witness(const ProcessModel& m, const SpectralReport& rep);

// Everything the basin/fixed-point machinery needs, computed once.
struct ModelAnalysis {
  SpectralReport spectral;
  GfPosWitness pos;
  GfBdedWitness bded;
};

// Throws HypothesisError naming every failed hypothesis among subcriticality,
// positive regularity, and non-singularity; otherwise returns witnesses.
ModelAnalysis require_hypotheses(const ProcessModel& m);

}  // namespace mtbp
