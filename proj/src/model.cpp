#include "mtbp/model.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace mtbp {

void validate_model(const ProcessModel& m) {
  if (m.d <= 0) throw std::invalid_argument("model must have at least one type");
  if (static_cast<int>(m.types.size()) != m.d)
    throw std::invalid_argument("model lists " + std::to_string(m.types.size()) + " types but d = " +
                                std::to_string(m.d));
  for (int k = 0; k < m.d; ++k) {
    const auto& entries = m.types[k].entries;
    if (entries.empty())
      throw std::invalid_argument("type " + std::to_string(k + 1) + " has no offspring entries");
    std::set<std::vector<int>> seen;
    double fsum = 0.0;
    Rational rsum(0);
    bool all_exact = true;
    for (const auto& e : entries) {
      if (e.counts.size() != m.d)
        throw std::invalid_argument("type " + std::to_string(k + 1) + ": count vector dimension mismatch");
      long long total = 0;
      for (int j = 0; j < m.d; ++j) {
        if (e.counts[j] < 0)
          throw std::invalid_argument("type " + std::to_string(k + 1) + ": negative offspring count");
        total += e.counts[j];
      }
      if (total > kMaxOffspringPerEntry)
        throw std::invalid_argument("type " + std::to_string(k + 1) +
                                    ": entry total offspring exceeds cap of 1000000");
      std::vector<int> key(e.counts.data(), e.counts.data() + m.d);
      if (!seen.insert(key).second)
        throw std::invalid_argument("type " + std::to_string(k + 1) + ": duplicate count vector");
      if (!(e.prob >= 0.0 && e.prob <= 1.0) || !std::isfinite(e.prob))
        throw std::invalid_argument("type " + std::to_string(k + 1) + ": probability outside [0,1]");
      if (e.prob_exact) {
        if (e.prob_exact->sign() < 0 || *e.prob_exact > Rational(1))
          throw std::invalid_argument("type " + std::to_string(k + 1) + ": probability outside [0,1]");
        rsum += *e.prob_exact;
      } else {
        all_exact = false;
      }
      fsum += e.prob;
    }
    if (all_exact) {
      if (rsum != Rational(1))
        throw std::invalid_argument("type " + std::to_string(k + 1) + ": probabilities sum to " +
                                    rsum.to_string() + ", expected exactly 1");
    } else if (std::abs(fsum - 1.0) > 1e-12) {
      throw std::invalid_argument("type " + std::to_string(k + 1) + ": probabilities sum to " +
                                  std::to_string(fsum) + ", outside 1e-12 of 1");
    }
  }
}

EvalCache make_eval_cache(const ProcessModel& m) {
  EvalCache c;
  c.counts.reserve(m.types.size());
  c.logp.reserve(m.types.size());
  for (const auto& t : m.types) {
    Eigen::MatrixXd cm(static_cast<int>(t.entries.size()), m.d);
    Eigen::VectorXd lp(static_cast<int>(t.entries.size()));
    for (int i = 0; i < cm.rows(); ++i) {
      for (int j = 0; j < m.d; ++j) cm(i, j) = static_cast<double>(t.entries[i].counts[j]);
      lp[i] = t.entries[i].prob > 0.0 ? std::log(t.entries[i].prob)
                                      : -std::numeric_limits<double>::infinity();
    }
    c.counts.push_back(std::move(cm));
    c.logp.push_back(std::move(lp));
  }
  return c;
}

IterateResult eval_f_iter(const ProcessModel& m, const QVec& q, int n) {
  if (n < 0) throw std::invalid_argument("eval_f_iter: negative iterate count");
  IterateResult r{q, false};
  for (int step = 0; step < n; ++step) {
    r.q = eval_f<double>(m, r.q);
    for (int k = 0; k < m.d; ++k) {
      if (!(r.q[k] <= kSaturationClamp)) {  // catches +inf and NaN from overflow
        r.q[k] = kSaturationClamp;
        r.saturated = true;
      }
    }
  }
  return r;
}

VecX<Rational> eval_f_iter_exact(const ProcessModel& m, const VecX<Rational>& q, int n) {
  if (n < 0) throw std::invalid_argument("eval_f_iter_exact: negative iterate count");
  VecX<Rational> cur = q;
  for (int step = 0; step < n; ++step) cur = eval_f<Rational>(m, cur);
  return cur;
}

LambdaVec eval_g(const ProcessModel& m, const EvalCache& cache, const LambdaVec& lambda) {
  if (lambda.size() != m.d) throw std::invalid_argument("eval_g: point dimension mismatch");
  LambdaVec out(m.d);
  for (int k = 0; k < m.d; ++k) {
    // log sum_i exp(logp_i + counts_i . lambda), guarded against overflow.
    Eigen::VectorXd t = cache.logp[k] + cache.counts[k] * lambda;
    double mx = t.maxCoeff();
    if (!std::isfinite(mx)) {
      out[k] = mx;  // all-zero probabilities cannot happen in a validated model
      continue;
    }
    double s = (t.array() - mx).exp().sum();
    out[k] = mx + std::log(s);
  }
  return out;
}

LambdaVec eval_g(const ProcessModel& m, const LambdaVec& lambda) {
  return eval_g(m, make_eval_cache(m), lambda);
}

}  // namespace mtbp
