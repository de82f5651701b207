#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mtbp/eigen_support.hpp"
#include "mtbp/rational.hpp"

namespace mtbp {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using QVec = Eigen::VectorXd;       // points in offspring-count PGF space
using LambdaVec = Eigen::VectorXd;  // log-space points, componentwise log q

// One atom of an offspring law: "this type produces exactly `counts`
// children (counts[j] of type j+1) with probability prob".
struct OffspringEntry {
  Eigen::VectorXi counts;
  double prob = 0.0;
  std::optional<Rational> prob_exact;
};

struct OffspringDistribution {
  std::vector<OffspringEntry> entries;
};

// Finitely supported multi-type offspring model with d types.
struct ProcessModel {
  int d = 0;
  std::vector<OffspringDistribution> types;

  // True when every entry carries an exact probability.
  bool rational() const {
    for (const auto& t : types)
      for (const auto& e : t.entries)
        if (!e.prob_exact) return false;
    return d > 0;
  }
};

inline constexpr double kSaturationClamp = 1.0142320547350045e+304;  // exp(700)
inline constexpr long long kMaxOffspringPerEntry = 1000000;

// Throws std::invalid_argument describing the first violated constraint:
// shape mismatches, negative counts, entry totals above the offspring cap,
// duplicate count vectors within a type, probabilities outside [0,1], or
// per-type sums away from one (exactly one in rational mode, within 1e-12
// otherwise).
void validate_model(const ProcessModel& m);

// Per-type dense views used by the double-precision hot paths.
struct EvalCache {
  std::vector<Eigen::MatrixXd> counts;  // entries x d
  std::vector<Eigen::VectorXd> logp;    // log prob per entry, -inf for zero
};
EvalCache make_eval_cache(const ProcessModel& m);

template <typename Scalar>
Scalar pow_int(Scalar base, long long e) {
  Scalar r(1);
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

// Scalar-generic access to an entry's probability.
template <typename Scalar>
Scalar entry_prob(const OffspringEntry& e);
template <>
inline double entry_prob<double>(const OffspringEntry& e) {
  return e.prob;
}
template <>
inline Rational entry_prob<Rational>(const OffspringEntry& e) {
  if (!e.prob_exact) throw std::invalid_argument("exact evaluation on a non-rational model");
  return *e.prob_exact;
}

// Generating function f_k(q) = sum_entries prob * prod_j q_j^counts_j.
template <typename Scalar>
VecX<Scalar> eval_f(const ProcessModel& m, const VecX<Scalar>& q) {
  if (q.size() != m.d) throw std::invalid_argument("eval_f: point dimension mismatch");
  VecX<Scalar> out(m.d);
  for (int k = 0; k < m.d; ++k) {
    Scalar acc(0);
    for (const auto& e : m.types[k].entries) {
      Scalar term = entry_prob<Scalar>(e);
      for (int j = 0; j < m.d; ++j)
        if (e.counts[j] != 0) term = term * pow_int<Scalar>(q[j], e.counts[j]);
      acc = acc + term;
    }
    out[k] = acc;
  }
  return out;
}

// Jacobian of f: J_{k,j} = d f_k / d q_j. The derivative of a monomial with
// exponent x_j is evaluated as x_j * q_j^{x_j - 1} * prod_{i != j} q_i^{x_i},
// so points with zero coordinates are fine (0^0 = 1).
template <typename Scalar>
MatX<Scalar> jacobian_f(const ProcessModel& m, const VecX<Scalar>& q) {
  if (q.size() != m.d) throw std::invalid_argument("jacobian_f: point dimension mismatch");
  MatX<Scalar> out(m.d, m.d);
  for (int k = 0; k < m.d; ++k)
    for (int j = 0; j < m.d; ++j) out(k, j) = Scalar(0);
  for (int k = 0; k < m.d; ++k) {
    for (const auto& e : m.types[k].entries) {
      for (int j = 0; j < m.d; ++j) {
        if (e.counts[j] == 0) continue;
        Scalar term = entry_prob<Scalar>(e) * Scalar(e.counts[j]);
        for (int i = 0; i < m.d; ++i) {
          long long x = e.counts[i] - (i == j ? 1 : 0);
          if (x != 0) term = term * pow_int<Scalar>(q[i], x);
        }
        out(k, j) = out(k, j) + term;
      }
    }
  }
  return out;
}

// Expected offspring counts M_{k,j} = E_k[number of type-(j+1) children].
template <typename Scalar>
MatX<Scalar> mean_matrix(const ProcessModel& m) {
  MatX<Scalar> out(m.d, m.d);
  for (int k = 0; k < m.d; ++k)
    for (int j = 0; j < m.d; ++j) out(k, j) = Scalar(0);
  for (int k = 0; k < m.d; ++k)
    for (const auto& e : m.types[k].entries)
      for (int j = 0; j < m.d; ++j)
        if (e.counts[j] != 0) out(k, j) = out(k, j) + entry_prob<Scalar>(e) * Scalar(e.counts[j]);
  return out;
}

struct IterateResult {
  QVec q;
  bool saturated = false;
};

// n-fold composition f(f(...f(q))) with components clamped at exp(700) scale;
// the flag records whether clamping ever fired.
IterateResult eval_f_iter(const ProcessModel& m, const QVec& q, int n);

// Exact n-fold composition; no clamping, so keep n small on rational models.
VecX<Rational> eval_f_iter_exact(const ProcessModel& m, const VecX<Rational>& q, int n);

// Log-space generating map g(lambda) = log f(exp lambda), evaluated stably
// via per-entry log-sum-exp; safe for very large lambda.
LambdaVec eval_g(const ProcessModel& m, const EvalCache& cache, const LambdaVec& lambda);
LambdaVec eval_g(const ProcessModel& m, const LambdaVec& lambda);

}  // namespace mtbp
