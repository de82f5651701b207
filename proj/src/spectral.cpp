#include "mtbp/spectral.hpp"

#include <cmath>
#include <limits>

namespace mtbp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Critical: return "critical";
    case Criticality::Supercritical: return "supercritical";
  }
  return "?";
}

std::pair<bool, int> check_positive_regular(const ProcessModel& m) {
  const int d = m.d;
  Eigen::MatrixXd M = mean_matrix<double>(m);
  using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  BoolMat base(d, d), power(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) base(i, j) = M(i, j) > 0.0;
  power = base;
  // Wielandt: a primitive d x d pattern reaches all-positive by d^2 - 2d + 2.
  const int bound = d * d - 2 * d + 2;
  for (int n = 1; n <= bound; ++n) {
    bool all = true;
    for (int i = 0; i < d && all; ++i)
      for (int j = 0; j < d; ++j)
        if (!power(i, j)) {
          all = false;
          break;
        }
    if (all) return {true, n};
    BoolMat next(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        bool v = false;
        for (int k = 0; k < d; ++k)
          if (power(i, k) && base(k, j)) {
            v = true;
            break;
          }
        next(i, j) = v;
      }
    power = next;
  }
  return {false, 0};
}

std::pair<bool, int> check_non_singular(const ProcessModel& m) {
  for (int k = 0; k < m.d; ++k)
    for (const auto& e : m.types[k].entries) {
      long long total = 0;
      for (int j = 0; j < m.d; ++j) total += e.counts[j];
      if (total >= 2 && e.prob > 0.0) return {true, k + 1};
    }
  return {false, 0};
}

// Applied as N mat-vecs with per-step normalization so tiny rho^N cannot
// underflow; N = 0 runs on M + I, whose dominant eigenvalue rho + 1 has
// unique modulus for any non-negative M.
PowerResult power_spectral_radius(const Eigen::MatrixXd& M, int N, const PerronOptions& opt) {
  const int d = static_cast<int>(M.rows());
  PowerResult res;
  res.v = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  if (d == 1) {
    res.rho = M(0, 0);
    res.v[0] = 1.0;
    res.converged = true;
    return res;
  }
  double prev_rho = -1.0;
  while (res.matvecs < opt.max_matvecs) {
    Eigen::VectorXd y = res.v;
    double log_scale = 0.0;
    if (N >= 1) {
      for (int i = 0; i < N; ++i) {
        y = M * y;
        ++res.matvecs;
        double n2 = y.norm();
        if (n2 == 0.0) return res;  // nilpotent direction; cannot converge
        y /= n2;
        log_scale += std::log(n2);
      }
    } else {
      y = M * y + y;
      ++res.matvecs;
      double n2 = y.norm();
      if (n2 == 0.0) return res;
      y /= n2;
      log_scale += std::log(n2);
    }
    double dot = res.v.dot(y);
    double rho_step;
    if (N >= 1) {
      // Rayleigh quotient of M^N is exp(log_scale) * dot; take the N-th root.
      rho_step = std::exp((log_scale + std::log(std::max(dot, 1e-300))) / N);
    } else {
      rho_step = std::exp(log_scale) * dot - 1.0;
    }
    res.v = y;
    if (prev_rho >= 0.0 && std::abs(rho_step - prev_rho) <= opt.tol * std::max(1.0, rho_step)) {
      res.rho = rho_step;
      res.converged = true;
      return res;
    }
    prev_rho = rho_step;
    res.rho = rho_step;
  }
  return res;
}

SpectralReport analyze_spectral(const ProcessModel& m, const PerronOptions& opt) {
  validate_model(m);
  SpectralReport rep;
  rep.M = mean_matrix<double>(m);
  auto [pr, prN] = check_positive_regular(m);
  rep.positive_regular = pr;
  rep.pr_witness_N = prN;
  auto [ns, nsK] = check_non_singular(m);
  rep.non_singular = ns;
  rep.ns_witness_type = nsK;

  rep.perron_fallback = !pr;
  PowerResult pit = power_spectral_radius(rep.M, pr ? prN : 0, opt);
  rep.rho = pit.rho;
  rep.perron_converged = pit.converged;
  rep.perron_iterations = pit.matvecs;
  rep.v = pit.v.cwiseAbs();
  double vmax = rep.v.maxCoeff();
  if (vmax > 0.0) rep.v /= vmax;

  if (rep.rho > 1.0 + 1e-9) {
    rep.criticality = Criticality::Supercritical;
  } else if (rep.rho < 1.0 - 1e-9) {
    rep.criticality = Criticality::Subcritical;
  } else {
    rep.criticality = Criticality::Critical;
  }
  rep.near_critical = std::abs(rep.rho - 1.0) < 1e-6;
  return rep;
}

GfPosWitness gf_pos_witness(const ProcessModel& m) {
  auto [pr, prN] = check_positive_regular(m);
  auto [ns, nsK] = check_non_singular(m);
  (void)nsK;
  if (!pr || !ns)
    throw HypothesisError("pair-positivity witness needs positive regularity and non-singularity",
                          {pr ? "non-singularity" : "positive-regularity"});
  const int d = m.d;

  // Best single-step log probabilities for one tracked parent:
  //   best1[k][j]: an entry of type k+1 containing a child of type j+1;
  //   best2[k][pair(i,j)]: an entry containing the unordered pair {i+1, j+1}
  //   (two children of the same type when i == j).
  auto pair_index = [d](int i, int j) {
    if (i > j) std::swap(i, j);
    return i * d - i * (i - 1) / 2 + (j - i);
  };
  const int npairs = d * (d + 1) / 2;
  Eigen::MatrixXd best1 = Eigen::MatrixXd::Constant(d, d, kNegInf);
  Eigen::MatrixXd best2 = Eigen::MatrixXd::Constant(d, npairs, kNegInf);
  for (int k = 0; k < d; ++k) {
    for (const auto& e : m.types[k].entries) {
      if (e.prob <= 0.0) continue;
      double lp = std::log(e.prob);
      for (int i = 0; i < d; ++i) {
        if (e.counts[i] < 1) continue;
        best1(k, i) = std::max(best1(k, i), lp);
        if (e.counts[i] >= 2) {
          int pi = pair_index(i, i);
          best2(k, pi) = std::max(best2(k, pi), lp);
        }
        for (int j = i + 1; j < d; ++j) {
          if (e.counts[j] < 1) continue;
          int pi = pair_index(i, j);
          best2(k, pi) = std::max(best2(k, pi), lp);
        }
      }
    }
  }

  // Max-product dynamic program over the two ancestral lines of a witness
  // pair: configurations are one tracked individual (before the lines split)
  // or an unordered pair of tracked individuals (after). Any realization
  // placing the target pair at horizon N restricts to such a forest, so
  // reachability here is exact and the value is a certified lower bound.
  Eigen::MatrixXd vs(d, d);          // vs(start, i): one tracked line
  Eigen::MatrixXd vp(d, npairs);     // vp(start, pair)
  vs.setConstant(kNegInf);
  vp.setConstant(kNegInf);
  for (int k = 0; k < d; ++k) vs(k, k) = 0.0;

  const int hard_bound = 2 * prN + 1;
  GfPosWitness w;
  for (int n = 1; n <= hard_bound; ++n) {
    Eigen::MatrixXd ns_(d, d), np(d, npairs);
    ns_.setConstant(kNegInf);
    np.setConstant(kNegInf);
    for (int start = 0; start < d; ++start) {
      for (int k = 0; k < d; ++k) {
        double base = vs(start, k);
        if (base == kNegInf) continue;
        for (int j = 0; j < d; ++j)
          if (best1(k, j) != kNegInf) ns_(start, j) = std::max(ns_(start, j), base + best1(k, j));
        for (int p = 0; p < npairs; ++p)
          if (best2(k, p) != kNegInf) np(start, p) = std::max(np(start, p), base + best2(k, p));
      }
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          double base = vp(start, pair_index(i, j));
          if (base == kNegInf) continue;
          // Each tracked parent extends its own line.
          for (int a = 0; a < d; ++a) {
            if (best1(i, a) == kNegInf) continue;
            double va = base + best1(i, a);
            for (int b = 0; b < d; ++b) {
              if (best1(j, b) == kNegInf) continue;
              int pi = pair_index(a, b);
              np(start, pi) = std::max(np(start, pi), va + best1(j, b));
            }
          }
          // Dropping one tracked line is always allowed.
          for (int a = 0; a < d; ++a) {
            if (best1(i, a) != kNegInf) ns_(start, a) = std::max(ns_(start, a), base + best1(i, a));
            if (best1(j, a) != kNegInf) ns_(start, a) = std::max(ns_(start, a), base + best1(j, a));
          }
        }
      }
    }
    vs = std::move(ns_);
    vp = std::move(np);

    bool all = true;
    for (int k = 0; k < d && all; ++k)
      for (int j = 0; j < d; ++j)
        if (vp(k, pair_index(k, j)) == kNegInf) {
          all = false;
          break;
        }
    if (all) {
      w.N = n;
      w.log_p.resize(d, d);
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) w.log_p(k, j) = vp(k, pair_index(k, j));
      w.log_m_min = w.log_p.minCoeff();
      w.C = -w.log_m_min;
      return w;
    }
  }
  throw std::logic_error("pair-positivity witness not found within 2N0+1 steps");
}

GfBdedWitness gf_bded_witness(const ProcessModel& m, const SpectralReport& rep) {
  if (rep.criticality != Criticality::Subcritical)
    throw HypothesisError("strict supersolution requires a subcritical model", {"subcriticality"});
  // Direction for the supersolution: w = (I - M)^{-1} 1 satisfies
  // M w = w - 1, so the linearized slack is a uniform -eps at every
  // coordinate. The Perron vector also works in exact arithmetic, but its
  // trailing coordinates can decay below double resolution on strongly
  // graded models, losing strictness; this w stays within [1, sup] always.
  Eigen::VectorXd dir;
  {
    Eigen::MatrixXd ImM = Eigen::MatrixXd::Identity(m.d, m.d) - rep.M;
    dir = Eigen::PartialPivLU<Eigen::MatrixXd>(ImM).solve(Eigen::VectorXd::Ones(m.d));
    if (!dir.allFinite() || dir.minCoeff() <= 0.0) dir = rep.v;  // near-critical fallback
    dir /= dir.maxCoeff();
  }
  GfBdedWitness w;
  for (int i = 0; i <= 30; ++i) {
    double eps = 0.5 * std::pow(0.5, i);
    QVec q0 = QVec::Ones(m.d) + eps * dir;
    QVec fq = eval_f<double>(m, q0);
    bool ok = true;
    for (int k = 0; k < m.d; ++k)
      if (!(fq[k] < q0[k])) {
        ok = false;
        break;
      }
    if (ok) {
      w.eps = eps;
      w.q0 = q0;
      w.lambda0 = q0.array().log();
      return w;
    }
  }
  throw HypothesisError("no strict supersolution found along the halving schedule", {"subcriticality"});
}

ModelAnalysis require_hypotheses(const ProcessModel& m) {
  SpectralReport rep = analyze_spectral(m);
  std::vector<std::string> failed;
  if (rep.criticality != Criticality::Subcritical) failed.push_back("subcriticality");
  if (!rep.positive_regular) failed.push_back("positive-regularity");
  if (!rep.non_singular) failed.push_back("non-singularity");
  if (!failed.empty()) {
    std::string msg = "hypothesis check failed:";
    for (const auto& f : failed) msg += " " + f;
    if (rep.criticality != Criticality::Subcritical)
      msg += " (Perron root " + std::to_string(rep.rho) + ")";
    throw HypothesisError(msg, failed);
  }
  ModelAnalysis a{rep, gf_pos_witness(m), gf_bded_witness(m, rep)};
  return a;
}

}  // namespace mtbp
