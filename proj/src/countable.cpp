#include "mtbp/countable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mtbp/spectral.hpp"

namespace mtbp {

ProcessModel truncate(const CountableFamily& fam, int d) {
  if (d < 1 || d > fam.d_max) throw std::invalid_argument("truncation level out of range");
  ProcessModel out;
  out.d = d;
  out.types.resize(d);
  const bool exact = fam.table.rational();
  for (int k = 0; k < d; ++k) {
    // merge by truncated count vector, preserving first-seen entry order
    std::map<std::vector<int>, std::size_t> seen;
    std::vector<Eigen::VectorXi> counts;
    std::vector<double> probs;
    std::vector<Rational> probs_exact;
    for (const auto& e : fam.table.types[k].entries) {
      std::vector<int> key(e.counts.data(), e.counts.data() + d);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, counts.size());
        Eigen::VectorXi c(d);
        for (int j = 0; j < d; ++j) c[j] = e.counts[j];
        counts.push_back(c);
        probs.push_back(e.prob);
        if (exact) probs_exact.push_back(*e.prob_exact);
      } else {
        probs[it->second] += e.prob;
        if (exact) probs_exact[it->second] = probs_exact[it->second] + *e.prob_exact;
      }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      OffspringEntry entry;
      entry.counts = counts[i];
      entry.prob = exact ? probs_exact[i].to_double() : probs[i];
      if (exact) entry.prob_exact = probs_exact[i];
      out.types[k].entries.push_back(std::move(entry));
    }
  }
  validate_model(out);
  return out;
}

TruncationScan truncation_scan(const CountableFamily& fam, const std::vector<int>& schedule,
                               const FixedPointOptions& finder) {
  TruncationScan scan;
  const TruncationRecord* prev = nullptr;
  for (int d : schedule) {
    ProcessModel model;
    try {
      model = truncate(fam, d);
    } catch (const std::exception& e) {
      scan.aborted = true;
      scan.abort_d = d;
      scan.abort_reason = e.what();
      return scan;
    }

    FixedPointOptions opt = finder;
    opt.allow_boundary = true;  // trailing coordinates approach 1 on graded families
    if (prev) {
      QVec seed = QVec::Ones(d);
      for (int j = 0; j < std::min<int>(prev->representative.size(), d); ++j)
        seed[j] = prev->representative[j];
      for (int j = static_cast<int>(prev->representative.size()); j < d; ++j)
        seed[j] = 1.0 + 1e-6;
      opt.extra_seeds.push_back(seed);
    }

    TruncationRecord rec;
    rec.d = d;
    try {
      rec.report = find_fixed_points(model, opt);
      GfPosWitness pos = gf_pos_witness(model);
      rec.bound.resize(d);
      for (int k = 0; k < d; ++k) rec.bound[k] = -pos.log_p(k, k);
    } catch (const std::exception& e) {
      scan.aborted = true;
      scan.abort_d = d;
      scan.abort_reason = e.what();
      return scan;
    }
    if (rec.report.points.empty()) {
      scan.aborted = true;
      scan.abort_d = d;
      scan.abort_reason = "no fixed point located at this level";
      return scan;
    }

    std::size_t pick = 0;
    if (prev) {
      double best = std::numeric_limits<double>::infinity();
      int shared = std::min<int>(prev->representative.size(), d);
      for (std::size_t i = 0; i < rec.report.points.size(); ++i) {
        double dist = 0.0;
        for (int j = 0; j < shared; ++j)
          dist = std::max(dist,
                          std::abs(rec.report.points[i].q[j] - prev->representative[j]));
        if (dist < best) {
          best = dist;
          pick = i;  // points are lex-sorted, so ties keep the smallest
        }
      }
    }
    rec.representative = rec.report.points[pick].q;
    rec.rep_lambda = rec.representative.array().log();
    if (prev) {
      rec.has_prev = true;
      int shared = std::min<int>(prev->rep_lambda.size(), d);
      double diff = 0.0;
      for (int j = 0; j < shared; ++j)
        diff = std::max(diff, std::abs(rec.rep_lambda[j] - prev->rep_lambda[j]));
      rec.sup_diff_prev = diff;
    }
    rec.bound_ok = true;
    for (int k = 0; k < d; ++k)
      if (rec.rep_lambda[k] > rec.bound[k] + 1e-9) rec.bound_ok = false;
    rec.max_head = rec.rep_lambda.head(std::min(2, d)).maxCoeff();

    scan.records.push_back(std::move(rec));
    prev = &scan.records.back();
  }
  return scan;
}

namespace {

// Deterministic q samples in [1, inf)^d: constant levels, single-axis bumps,
// and geometric decay profiles at several magnitudes.
std::vector<QVec> sample_grid(int d) {
  std::vector<QVec> qs;
  const double levels[] = {1.0, 1.05, 1.25, 1.5, 2.0, 4.0, 10.0, 100.0, 1000.0};
  for (double s : levels) qs.push_back(QVec::Constant(d, s));
  for (double s : {1.5, 3.0, 20.0})
    for (int j = 0; j < d; ++j) {
      QVec q = QVec::Ones(d);
      q[j] = s;
      qs.push_back(q);
    }
  for (double s : {2.0, 8.0, 64.0})
    for (double decay : {0.5, 0.9}) {
      QVec q(d);
      double bump = s - 1.0;
      for (int j = 0; j < d; ++j) {
        q[j] = 1.0 + bump;
        bump *= decay;
      }
      qs.push_back(q);
    }
  return qs;
}

std::string describe_sample(const QVec& q) {
  std::ostringstream os;
  os << "q = [";
  int d = static_cast<int>(q.size());
  for (int j = 0; j < std::min(d, 6); ++j) {
    if (j) os << ", ";
    os << q[j];
  }
  if (d > 6) os << ", ...";
  os << "]";
  return os.str();
}

}  // namespace

AssumptionsReport check_assumptions(const CountableFamily& fam) {
  AssumptionsReport rep;
  const ProcessModel& m = fam.table;
  const int d = m.d;

  if (static_cast<int>(fam.phi.size()) != d || static_cast<int>(fam.psi.size()) != d) {
    rep.items.push_back({"bounded-spatial-growth", "UNCHECKABLE", "weight tables missing", 0.0});
    rep.items.push_back({"bounded-growth-in-k", "UNCHECKABLE", "weight tables missing", 0.0});
    rep.items.push_back({"weighted-subcriticality", "UNCHECKABLE", "weight tables missing", 0.0});
    rep.all_pass = false;
    return rep;
  }

  std::vector<QVec> samples = sample_grid(d);

  // Spatial growth: on the sampled slice of {q >= 1 : f_k(q) <= q_k}, the
  // 3/2-power perturbation must stay bounded. An effectively unbounded
  // value betrays an unbounded constraint region.
  {
    AssumptionVerdict v{"bounded-spatial-growth", "SAMPLED-PASS", "", 0.0};
    const double alpha = 1.5;
    const double fail_at = 1e12;
    long long feasible = 0;
    for (const QVec& q : samples) {
      QVec fq = eval_f<double>(m, q);
      QVec qa = q.array().pow(alpha);
      QVec fqa = eval_f<double>(m, qa);
      for (int k = 0; k < d; ++k) {
        if (!(fq[k] <= q[k])) continue;  // outside the constraint region
        ++feasible;
        if (!std::isfinite(fqa[k]) || fqa[k] > fail_at) {
          v.verdict = "FAIL";
          v.witness = "type " + std::to_string(k + 1) + " at " + describe_sample(q);
          v.worst = fqa[k];
          break;
        }
        v.worst = std::max(v.worst, fqa[k]);
      }
      if (v.verdict == "FAIL") break;
    }
    if (feasible == 0 && v.verdict != "FAIL") {
      v.verdict = "UNCHECKABLE";
      v.witness = "no sampled point satisfied the constraint";
    }
    rep.items.push_back(v);
  }

  // Growth in k: f_k(q) <= psi(k) f_1(q)^{phi(k)} on the grids, plus the
  // tabulated-proxy demands on the weights themselves.
  {
    AssumptionVerdict v{"bounded-growth-in-k", "SAMPLED-PASS", "", 0.0};
    std::string notes;
    double phi_min = fam.phi[0], phi_max = fam.phi[0];
    bool nondecreasing = true;
    for (int k = 0; k < d; ++k) {
      phi_min = std::min(phi_min, fam.phi[k]);
      phi_max = std::max(phi_max, fam.phi[k]);
      if (k > 0 && fam.phi[k] < fam.phi[k - 1]) nondecreasing = false;
    }
    if (!nondecreasing) notes += "phi is not nondecreasing on the table; ";
    if (d > 1 && phi_max == phi_min) {
      v.verdict = "FAIL";
      v.witness = "phi is constant on the table, so phi(k) -> infinity fails";
    } else {
      double worst_ratio = 0.0;
      for (const QVec& q : samples) {
        QVec fq = eval_f<double>(m, q);
        for (int k = 0; k < d && v.verdict != "FAIL"; ++k) {
          double lhs = std::log(fq[k]);
          double rhs = std::log(fam.psi[k]) + fam.phi[k] * std::log(fq[0]);
          if (lhs > rhs + 1e-9) {
            v.verdict = "FAIL";
            v.witness = "type " + std::to_string(k + 1) + " at " + describe_sample(q);
            v.worst = lhs - rhs;
          }
          worst_ratio = std::max(worst_ratio, lhs - rhs);
        }
        if (v.verdict == "FAIL") break;
      }
      if (v.verdict != "FAIL") {
        v.worst = worst_ratio;  // most negative slack observed, still <= 0
        v.witness = notes;
      }
    }
    rep.items.push_back(v);
  }

  // Weighted subcriticality: exact finite evaluation per tabulated type,
  // scanning a halving schedule when no margin was supplied.
  {
    AssumptionVerdict v{"weighted-subcriticality", "SAMPLED-PASS", "", 0.0};
    std::vector<double> eps_candidates;
    if (fam.has_epsilon)
      eps_candidates.push_back(fam.epsilon);
    else
      for (int i = 0; i <= 20; ++i) eps_candidates.push_back(std::pow(0.5, i));
    bool found = false;
    for (double eps : eps_candidates) {
      bool ok = true;
      double worst = 0.0;
      int worst_k = 0;
      for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (const auto& e : m.types[k].entries) {
          double w = 0.0;
          for (int j = 0; j < d; ++j) w += fam.phi[j] * e.counts[j];
          acc += e.prob * std::pow(1.0 + eps, w);
        }
        if (acc - (1.0 + eps) > worst) {
          worst = acc - (1.0 + eps);
          worst_k = k;
        }
        if (acc > 1.0 + eps + 1e-12) ok = false;
      }
      if (ok) {
        found = true;
        v.worst = worst;
        v.witness = "epsilon = " + std::to_string(eps);
        break;
      }
      if (fam.has_epsilon) {
        v.worst = worst;
        v.witness = "type " + std::to_string(worst_k + 1) + " exceeds the bound at epsilon = " +
                    std::to_string(eps);
      }
    }
    if (!found) {
      v.verdict = "FAIL";
      if (!fam.has_epsilon) v.witness = "no epsilon in the halving schedule worked";
    }
    rep.items.push_back(v);
  }

  rep.all_pass = true;
  for (const auto& item : rep.items)
    if (item.verdict != "SAMPLED-PASS") rep.all_pass = false;
  return rep;
}

}  // namespace mtbp
