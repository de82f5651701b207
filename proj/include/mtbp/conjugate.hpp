#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtbp/model.hpp"
#include "mtbp/spectral.hpp"

namespace mtbp {

// Exponential tilting by a fixed point A > 1 of f: entry probabilities become
// p(x) * prod_j A_j^{x_j} / A_k. The tilted process is supercritical and its
// law conditioned on extinction is the base law; both directions of that
// correspondence are verified here.

struct ConjugateModel {
  ProcessModel base;
  QVec A;
  bool exact = false;             // A certified rational with f(A) = A exactly
  std::vector<Rational> A_exact;  // populated when exact
  ProcessModel tilted;
  QVec extinction_vec;  // 1/A componentwise
  Eigen::VectorXd normalization_residuals;  // per type |sum - 1| before renormalizing
  SpectralReport tilted_spectral;
  double fixed_residual = 0.0;  // sup-norm of f(A) - A for the supplied A
};

// Raw tilt by an arbitrary positive weight vector (no fixed-point demand);
// float path renormalizes each type, exact path must divide out exactly.
ProcessModel tilt_by(const ProcessModel& m, const QVec& w);
ProcessModel tilt_by_exact(const ProcessModel& m, const std::vector<Rational>& w);

// Certified construction: A must satisfy f(A) = A within fixed_tol and lie
// strictly above 1. Coordinates are promoted to exact rationals when a small
// continued-fraction denominator reproduces them and the fixed-point identity
// holds exactly.
ConjugateModel tilt(const ProcessModel& m, const QVec& A, double fixed_tol = 1e-10);
ConjugateModel tilt_exact(const ProcessModel& m, const std::vector<Rational>& A);

struct ExtinctionIterate {
  QVec a;
  int iters = 0;
  double last_step = 0.0;
};
// Componentwise-smallest fixed point in the unit cube: limit of f iterated
// from zero.
ExtinctionIterate extinction_vector(const ProcessModel& m, double tol = 1e-14,
                                    int max_iters = 100000);

// Tilt by the extinction vector: the law of the process conditioned on
// eventual extinction.
ProcessModel condition_on_extinction(const ProcessModel& m);

struct TiltBackRecord {
  bool ok = false;
  // iterated extinction vector of the tilted model against 1/A
  double ext_residual = 0.0;
  int ext_iters = 0;
  bool ext_ok = false;
  // conditioning the tilted model back, compared entrywise with the base
  double entry_residual = 0.0;
  bool exact = false;        // rational path used
  bool exact_equal = false;  // entrywise rational equality
  std::string worst_entry;   // count vector of the worst float-path entry
};

TiltBackRecord verify_tilt_back(const ConjugateModel& conj);

struct ConditionedLawReport {
  long long replicas = 0;
  int generations = 0;
  long long accepted = 0;  // extinct within the horizon, never cap-hit
  long long cap_hit = 0;   // excluded from acceptance; visible bias note
  double acceptance_rate = 0.0;
  double expected_rate = 0.0;  // 1/A at the start type
  double acceptance_se = 0.0;
  std::vector<double> tv;  // per generation 1..min(G,3), vs the exact base law
  int start_type = 0;
  long long law_cap = 0;
};

// Simulates the tilted process, keeps replicas extinct by generation G, and
// compares their per-generation population laws with the exact base law on
// support truncated at total population 64.
ConditionedLawReport conditioned_law_mc(const ConjugateModel& conj, int generations,
                                        long long replicas, std::uint64_t seed,
                                        int start_type = 0);

}  // namespace mtbp
